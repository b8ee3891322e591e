#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "csr/model/model.hpp"
#include "csr/scene/windows.hpp"

namespace csr::train {

using diffnum::Tape;
using diffnum::Tensor;

struct SceneScore {
  std::string scene;
  double ade = 0.0;
  double fde = 0.0;
  std::size_t pedestrians = 0;
};

struct EvalReport {
  std::size_t k = 0;
  double ade = 0.0;
  double fde = 0.0;
  std::size_t pedestrians = 0;
  std::vector<double> per_frame;  // mean best-sample error at each future step
  std::vector<SceneScore> per_scene;
};

struct EvalOptions {
  std::size_t k = 20;
  std::uint64_t seed = 0;
  std::size_t batch_windows = 64;  // windows per forward pass; does not affect results
};

// Standard-normal noise for one (window, sample): delta tensors of
// [pedestrians, latent]. The stream depends only on (seed, window index,
// sample index), so the first k samples are shared by every larger k.
model::StepNoise sample_noise(std::uint64_t seed, std::size_t window_index, std::size_t sample,
                              std::size_t pedestrians, std::size_t delta, std::size_t latent);

// Inference-mode prediction of a single window under given noise.
struct WindowPrediction {
  Tensor raw;      // [N, 2 delta], anchored
  Tensor refined;  // equals raw when the model has no refiner
};
WindowPrediction predict_window(model::Model& model, const scene::SceneWindow& window,
                                const model::StepNoise& noise);

// Best-of-K: for every pedestrian the sample with the lowest ADE is kept and
// its ADE and FDE are averaged over pedestrians.
EvalReport evaluate(model::Model& model, std::span<const scene::SceneWindow> windows,
                    const EvalOptions& options);

}  // namespace csr::train
