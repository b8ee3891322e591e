#include "csr/model/batch.hpp"

#include "csr/error.hpp"

namespace csr::model {

Batch make_batch(std::span<const scene::SceneWindow* const> windows) {
  if (windows.empty()) throw UsageError("make_batch: no windows");
  Batch b;
  b.tau = windows[0]->tau;
  b.delta = windows[0]->delta;
  std::size_t rows = 0;
  b.offsets.push_back(0);
  for (const auto* w : windows) {
    if (w->tau != b.tau || w->delta != b.delta) throw UsageError("make_batch: mixed horizons");
    if (w->size() == 0) throw UsageError("make_batch: empty window");
    rows += w->size();
    b.offsets.push_back(rows);
  }
  b.past = Tensor::matrix(rows, 2 * b.tau);
  b.future = Tensor::matrix(rows, 2 * b.delta);
  b.last_abs = Tensor::matrix(rows, 2);
  std::size_t r = 0;
  for (const auto* w : windows) {
    for (std::size_t i = 0; i < w->size(); ++i, ++r) {
      for (std::size_t t = 0; t < b.tau; ++t) {
        b.past.at(r, 2 * t) = w->past_at(i, t).x;
        b.past.at(r, 2 * t + 1) = w->past_at(i, t).y;
      }
      for (std::size_t t = 0; t < b.delta; ++t) {
        b.future.at(r, 2 * t) = w->future_at(i, t).x;
        b.future.at(r, 2 * t + 1) = w->future_at(i, t).y;
      }
      const auto& last = w->absolute_past[i * b.tau + b.tau - 1];
      b.last_abs.at(r, 0) = last.x;
      b.last_abs.at(r, 1) = last.y;
    }
  }
  return b;
}

Batch make_batch(std::span<const scene::SceneWindow> windows) {
  std::vector<const scene::SceneWindow*> ptrs;
  ptrs.reserve(windows.size());
  for (const auto& w : windows) ptrs.push_back(&w);
  return make_batch(std::span<const scene::SceneWindow* const>(ptrs));
}

StepNoise draw_noise(std::mt19937_64& rng, std::size_t rows, std::size_t steps,
                     std::size_t latent_dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  StepNoise noise;
  noise.reserve(steps);
  for (std::size_t s = 0; s < steps; ++s) {
    Tensor t = Tensor::matrix(rows, latent_dim);
    for (double& v : t.values()) v = normal(rng);
    noise.push_back(std::move(t));
  }
  return noise;
}

}  // namespace csr::model
