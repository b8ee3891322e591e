#pragma once

#include <cstddef>
#include <optional>
#include <span>

#include "csr/model/batch.hpp"
#include "csr/model/config.hpp"
#include "csr/model/predictors.hpp"
#include "csr/model/social.hpp"

namespace csr::model {

// Everything a forward pass produces, all in the anchored frame.
struct ForwardResult {
  RawPrediction raw;
  Var refiner_input;  // raw points with gradients stopped
  Var offsets;  // [R, 2 delta]; invalid when the refiner is off
  Var refined;  // raw + offsets, or raw itself without a refiner
  bool refined_by_social = false;
};

// A trajectory head plus an optional social refiner sharing one ParamStore.
class Model {
 public:
  explicit Model(const ModelConfig& config);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;

  // `frozen_raw`, when given, replaces the heads' output as the refiner's
  // input. Finite-difference checks use it to hold the stop-gradient input
  // at its unperturbed value.
  ForwardResult forward(Tape& tape, const Batch& batch, RolloutMode mode, const StepNoise& noise,
                        const RolloutOptions& options = {}, const Tensor* frozen_raw = nullptr);

  const ModelConfig& config() const { return config_; }
  ParamStore& store() { return store_; }
  const ParamStore& store() const { return store_; }
  const Head& head() const { return head_; }
  const std::optional<SocialRefiner>& refiner() const { return refiner_; }
  std::size_t parameter_count() const { return store_.scalar_count(); }

  // Closed-form count for a configuration; equals parameter_count() of a
  // model built from it.
  static std::size_t count_for(const ModelConfig& config);

 private:
  ModelConfig config_;
  ParamStore store_;
  Head head_;
  std::optional<SocialRefiner> refiner_;
};

}  // namespace csr::model
