#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "csr/diffnum/tensor.hpp"
#include "csr/scene/windows.hpp"

namespace csr::model {

using diffnum::Tensor;

// Pedestrians of several windows stacked row-wise. Rows of window w are
// [offsets[w], offsets[w + 1]). Pedestrians only interact within a window.
struct Batch {
  std::size_t tau = 0;
  std::size_t delta = 0;
  Tensor past;      // [R, 2 tau], anchored, (x, y) interleaved
  Tensor future;    // [R, 2 delta], anchored
  Tensor last_abs;  // [R, 2], last observed point in scene coordinates
  std::vector<std::size_t> offsets;

  std::size_t rows() const { return past.rows(); }
  std::size_t windows() const { return offsets.size() - 1; }
};

Batch make_batch(std::span<const scene::SceneWindow> windows);
Batch make_batch(std::span<const scene::SceneWindow* const> windows);

// One standard-normal [rows, latent_dim] tensor per prediction step.
using StepNoise = std::vector<Tensor>;

StepNoise draw_noise(std::mt19937_64& rng, std::size_t rows, std::size_t steps,
                     std::size_t latent_dim);

}  // namespace csr::model
