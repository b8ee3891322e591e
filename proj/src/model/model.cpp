#include "csr/model/model.hpp"

#include <random>

#include "csr/diffnum/ops.hpp"

namespace csr::model {

Model::Model(const ModelConfig& config) : config_(config) {
  config_.validate();
  std::mt19937_64 rng(config_.seed);
  head_ = Head(store_, config_.head, config_.horizon, config_.widths, rng);
  if (config_.refiner) {
    refiner_.emplace(store_, config_.horizon, config_.widths, config_.mask_radius, rng);
  }
}

std::size_t Model::count_for(const ModelConfig& config) {
  std::size_t n = Head::count_for(config.head, config.horizon, config.widths);
  if (config.refiner) n += SocialRefiner::count_for(config.horizon, config.widths);
  return n;
}

ForwardResult Model::forward(Tape& tape, const Batch& batch, RolloutMode mode, const StepNoise& noise,
                             const RolloutOptions& options, const Tensor* frozen_raw) {
  RolloutOptions opts = options;
  if (mode == RolloutMode::kTrain) opts.teacher_forcing = opts.teacher_forcing || config_.teacher_forcing;
  ForwardResult out;
  out.raw = head_.rollout(tape, store_, batch, mode, noise, opts);
  if (!refiner_) {
    out.refined = out.raw.points;
    return out;
  }
  // The regression loss trains only the refiner: the heads see no gradient
  // through the raw prediction.
  const Var raw = frozen_raw ? tape.constant(*frozen_raw) : diffnum::stop_gradient(out.raw.points);
  const Var past = tape.constant(batch.past);
  const std::vector<SocialMask> masks = build_masks(batch, refiner_->mask_radius());
  out.offsets = refiner_->refine(tape, store_, past, raw, masks, batch.offsets);
  out.refiner_input = raw;
  out.refined = diffnum::add(raw, out.offsets);
  out.refined_by_social = true;
  return out;
}

}  // namespace csr::model
