#pragma once

#include <cstddef>
#include <random>
#include <vector>

#include "csr/model/batch.hpp"
#include "csr/model/config.hpp"
#include "csr/model/cvae_unit.hpp"

namespace csr::model {

enum class RolloutMode { kTrain, kInfer };

// Pre-refinement future in the anchored frame.
struct RawPrediction {
  Var points;                    // [R, 2 delta]
  std::vector<Var> step_points;  // delta x [R, 2]
  std::vector<Var> mu;           // delta x [R, latent] (train only)
  std::vector<Var> log_var;
};

struct RolloutOptions {
  // Append ground-truth points instead of predictions to the updated past
  // during training.
  bool teacher_forcing = false;
  // When set, receives a copy of the input each step's unit consumed.
  std::vector<Tensor>* captured_inputs = nullptr;
};

// The three trajectory heads:
//   baseline  delta independent units, each fed the observed past only
//   cascaded  delta unshared units; unit k sees the past plus the k points
//             predicted so far (width 2 (tau + k))
//   slide     one shared unit fed the most recent alpha points of the
//             observed-then-predicted sequence
class Head {
 public:
  Head() = default;
  Head(ParamStore& store, HeadKind kind, const Horizon& horizon, const NetworkWidths& widths,
       std::mt19937_64& rng);

  RawPrediction rollout(Tape& tape, ParamStore& store, const Batch& batch, RolloutMode mode,
                        const StepNoise& noise, const RolloutOptions& options = {}) const;

  HeadKind kind() const { return kind_; }
  const Horizon& horizon() const { return horizon_; }
  const std::vector<CvaeUnit>& units() const { return units_; }
  std::size_t parameter_count() const;

  static std::size_t count_for(HeadKind kind, const Horizon& horizon, const NetworkWidths& widths);

 private:
  HeadKind kind_ = HeadKind::kCascaded;
  Horizon horizon_;
  std::vector<CvaeUnit> units_;
};

}  // namespace csr::model
