#pragma once

#include <cstddef>
#include <span>

#include "csr/model/model.hpp"
#include "csr/scene/windows.hpp"

namespace csr::train {

using diffnum::Tape;
using diffnum::Tensor;

struct EfficiencyReport {
  std::size_t parameters = 0;
  double seconds_per_batch = 0.0;  // mean inference time (rollout + refine)
  std::size_t timed_batches = 0;
  std::size_t batch_windows = 0;
};

struct EfficiencyOptions {
  std::size_t batch_windows = 64;
  std::size_t warmup_batches = 2;
  std::size_t timed_batches = 20;
};

// Exact parameter count plus the mean wall time of inference batches drawn
// cyclically from `windows`.
EfficiencyReport efficiency_report(model::Model& model, std::span<const scene::SceneWindow> windows,
                                   const EfficiencyOptions& options = {});

}  // namespace csr::train
