#include "csr/train/evaluate.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <random>

#include "csr/error.hpp"
#include "csr/train/metrics.hpp"

namespace csr::train {

model::StepNoise sample_noise(std::uint64_t seed, std::size_t window_index, std::size_t sample,
                              std::size_t pedestrians, std::size_t delta, std::size_t latent) {
  const auto lo = [](std::uint64_t v) { return static_cast<std::uint32_t>(v); };
  const auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
  std::seed_seq seq{lo(seed), hi(seed), lo(window_index), hi(window_index), lo(sample), hi(sample)};
  std::mt19937_64 rng(seq);
  return model::draw_noise(rng, pedestrians, delta, latent);
}

WindowPrediction predict_window(model::Model& model, const scene::SceneWindow& window,
                                const model::StepNoise& noise) {
  const scene::SceneWindow* ptr = &window;
  const model::Batch batch = model::make_batch(std::span<const scene::SceneWindow* const>(&ptr, 1));
  Tape tape(false);
  const model::ForwardResult fwd = model.forward(tape, batch, model::RolloutMode::kInfer, noise);
  return {fwd.raw.points.value(), fwd.refined.value()};
}

EvalReport evaluate(model::Model& model, std::span<const scene::SceneWindow> windows,
                    const EvalOptions& options) {
  if (options.k == 0) throw UsageError("k must be >= 1");
  if (options.batch_windows == 0) throw UsageError("evaluation batch must be >= 1");
  if (windows.empty()) throw DataError("no evaluation windows");
  const auto& h = model.config().horizon;
  const std::size_t latent = model.config().widths.latent_dim;

  EvalReport report;
  report.k = options.k;
  report.per_frame.assign(h.delta, 0.0);
  std::map<std::string, SceneScore> scenes;
  std::vector<const scene::SceneWindow*> chunk;

  for (std::size_t begin = 0; begin < windows.size(); begin += options.batch_windows) {
    const std::size_t end = std::min(windows.size(), begin + options.batch_windows);
    chunk.clear();
    for (std::size_t i = begin; i < end; ++i) {
      if (windows[i].tau != h.tau || windows[i].delta != h.delta) {
        throw DataError("evaluation window horizon does not match the model");
      }
      chunk.push_back(&windows[i]);
    }
    const model::Batch batch = model::make_batch(chunk);
    const std::size_t rows = batch.rows();

    Tensor best_errors = Tensor::matrix(rows, h.delta);
    std::vector<double> best_ade(rows, std::numeric_limits<double>::infinity());

    for (std::size_t s = 0; s < options.k; ++s) {
      model::StepNoise noise(h.delta, Tensor::matrix(rows, latent));
      for (std::size_t w = 0; w < chunk.size(); ++w) {
        const std::size_t first = batch.offsets[w];
        const model::StepNoise part = sample_noise(options.seed, begin + w, s, chunk[w]->size(), h.delta, latent);
        for (std::size_t t = 0; t < h.delta; ++t) {
          std::copy(part[t].values().begin(), part[t].values().end(), noise[t].values().begin() + first * latent);
        }
      }
      Tape tape(false);
      const model::ForwardResult fwd = model.forward(tape, batch, model::RolloutMode::kInfer, noise);
      if (!fwd.refined.value().all_finite()) throw NumericError("non-finite prediction during evaluation");
      const Tensor errors = step_errors(batch.future, fwd.refined.value());
      for (std::size_t r = 0; r < rows; ++r) {
        const double a = row_ade(errors, r);
        if (a < best_ade[r]) {
          best_ade[r] = a;
          std::copy(errors.row(r).begin(), errors.row(r).end(), best_errors.row(r).begin());
        }
      }
    }

    for (std::size_t w = 0; w < chunk.size(); ++w) {
      SceneScore& sc = scenes[chunk[w]->scene_id];
      sc.scene = chunk[w]->scene_id;
      for (std::size_t r = batch.offsets[w]; r < batch.offsets[w + 1]; ++r) {
        const double a = row_ade(best_errors, r), f = row_fde(best_errors, r);
        report.ade += a;
        report.fde += f;
        sc.ade += a;
        sc.fde += f;
        ++sc.pedestrians;
        ++report.pedestrians;
        for (std::size_t t = 0; t < h.delta; ++t) report.per_frame[t] += best_errors.at(r, t);
      }
    }
  }

  const double n = static_cast<double>(report.pedestrians);
  report.ade /= n;
  report.fde /= n;
  for (double& v : report.per_frame) v /= n;
  for (auto& [id, sc] : scenes) {
    sc.ade /= static_cast<double>(sc.pedestrians);
    sc.fde /= static_cast<double>(sc.pedestrians);
    report.per_scene.push_back(sc);
  }
  return report;
}

}  // namespace csr::train
