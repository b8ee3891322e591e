#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "csr/diffnum/adam.hpp"
#include "csr/model/model.hpp"
#include "csr/scene/windows.hpp"
#include "csr/train/losses.hpp"

namespace csr::train {

struct TrainConfig {
  std::size_t epochs = 600;
  std::size_t batch_windows = 512;  // windows per optimizer step
  double lr = 3e-4;
  std::uint64_t seed = 0;  // shuffling and training noise

  // Small settings used by the desk-scale runs and tests.
  static TrainConfig desk();
  void validate() const;
};

struct EpochReport {
  std::size_t epoch = 0;  // 1-based
  LossReport loss;        // mean over the epoch's batches
};

using EpochCallback = std::function<void(const EpochReport&)>;

// Shuffles (seeded), batches, rolls out in training mode, refines, sums the
// three losses, backpropagates and takes an Adam step per batch. Throws
// NumericError naming the epoch and batch when a loss turns non-finite.
std::vector<EpochReport> train(model::Model& model, std::span<const scene::SceneWindow> windows,
                               const TrainConfig& config, const EpochCallback& on_epoch = {});

// One training step on a fixed batch; returns the batch losses. Used by
// train() and by tests that need direct control over noise.
LossReport train_step(model::Model& model, const model::Batch& batch, const model::StepNoise& noise,
                      const diffnum::AdamConfig& adam);

}  // namespace csr::train
