#include "csr/model/predictors.hpp"

#include <algorithm>
#include <array>

#include "csr/diffnum/ops.hpp"
#include "csr/error.hpp"

namespace csr::model {

Head::Head(ParamStore& store, HeadKind kind, const Horizon& horizon, const NetworkWidths& widths,
           std::mt19937_64& rng)
    : kind_(kind), horizon_(horizon) {
  horizon.validate(kind);
  switch (kind) {
    case HeadKind::kBaseline:
      for (std::size_t k = 0; k < horizon.delta; ++k) {
        units_.emplace_back(store, "baseline.unit" + std::to_string(k), horizon.tau, widths, rng);
      }
      break;
    case HeadKind::kCascaded:
      for (std::size_t k = 0; k < horizon.delta; ++k) {
        units_.emplace_back(store, "cascaded.unit" + std::to_string(k), horizon.tau + k, widths, rng);
      }
      break;
    case HeadKind::kSlide:
      units_.emplace_back(store, "slide.unit", horizon.alpha, widths, rng);
      break;
  }
}

std::size_t Head::parameter_count() const {
  std::size_t n = 0;
  for (const auto& u : units_) n += u.parameter_count();
  return n;
}

std::size_t Head::count_for(HeadKind kind, const Horizon& horizon, const NetworkWidths& widths) {
  switch (kind) {
    case HeadKind::kBaseline:
      return horizon.delta * CvaeUnit::count_for(horizon.tau, widths);
    case HeadKind::kCascaded: {
      std::size_t n = 0;
      for (std::size_t k = 0; k < horizon.delta; ++k) n += CvaeUnit::count_for(horizon.tau + k, widths);
      return n;
    }
    case HeadKind::kSlide:
      return CvaeUnit::count_for(horizon.alpha, widths);
  }
  return 0;
}

RawPrediction Head::rollout(Tape& tape, ParamStore& store, const Batch& batch, RolloutMode mode,
                            const StepNoise& noise, const RolloutOptions& options) const {
  const std::size_t tau = horizon_.tau, delta = horizon_.delta, alpha = horizon_.alpha;
  if (batch.tau != tau || batch.delta != delta) {
    throw UsageError("rollout: batch horizon (" + std::to_string(batch.tau) + ", " +
                     std::to_string(batch.delta) + ") does not match head (" + std::to_string(tau) +
                     ", " + std::to_string(delta) + ")");
  }
  if (noise.size() != delta) throw UsageError("rollout: need one noise tensor per step");
  const bool train = mode == RolloutMode::kTrain;

  const Var past = tape.constant(batch.past);
  const Var future = train ? tape.constant(batch.future) : Var{};

  RawPrediction out;
  std::vector<Var> fed;  // points appended to the updated past, one per step
  Var updated = past;    // cascaded only

  for (std::size_t k = 0; k < delta; ++k) {
    const CvaeUnit& unit = kind_ == HeadKind::kSlide ? units_.front() : units_[k];
    Var input;
    switch (kind_) {
      case HeadKind::kBaseline:
        input = past;
        break;
      case HeadKind::kCascaded:
        input = updated;
        break;
      case HeadKind::kSlide: {
        // Most recent alpha points: observed tail first, then predictions.
        std::vector<Var> parts;
        const std::size_t observed = k < alpha ? alpha - k : 0;
        if (observed > 0) parts.push_back(diffnum::slice_cols(past, 2 * (tau - observed), 2 * observed));
        for (std::size_t s = k - std::min(k, alpha); s < k; ++s) parts.push_back(fed[s]);
        input = parts.size() == 1 ? parts.front() : diffnum::concat_cols(parts);
        break;
      }
    }
    if (options.captured_inputs) options.captured_inputs->push_back(input.value());

    const Var eps = tape.constant(noise[k]);
    StepPrediction step;
    if (train) {
      const Var gt = diffnum::slice_cols(future, 2 * k, 2);
      step = unit.train_forward(tape, store, input, gt, eps);
      out.mu.push_back(step.mu);
      out.log_var.push_back(step.log_var);
    } else {
      step = unit.infer_forward(tape, store, input, eps);
    }
    out.step_points.push_back(step.point);

    const Var next = train && options.teacher_forcing ? diffnum::slice_cols(future, 2 * k, 2) : step.point;
    fed.push_back(next);
    if (kind_ == HeadKind::kCascaded && k + 1 < delta) {
      const std::array<Var, 2> parts{updated, next};
      updated = diffnum::concat_cols(parts);
    }
  }
  out.points = delta == 1 ? out.step_points.front() : diffnum::concat_cols(out.step_points);
  return out;
}

}  // namespace csr::model
