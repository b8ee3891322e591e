#include "csr/train/efficiency.hpp"

#include <chrono>
#include <random>

#include "csr/error.hpp"

namespace csr::train {

EfficiencyReport efficiency_report(model::Model& model, std::span<const scene::SceneWindow> windows,
                                   const EfficiencyOptions& options) {
  if (windows.empty()) throw DataError("efficiency report needs at least one window");
  if (options.batch_windows == 0 || options.timed_batches == 0) {
    throw UsageError("efficiency report needs a positive batch size and batch count");
  }
  EfficiencyReport rep;
  rep.parameters = model.parameter_count();
  rep.batch_windows = options.batch_windows;
  rep.timed_batches = options.timed_batches;

  std::vector<const scene::SceneWindow*> chunk;
  for (std::size_t i = 0; i < options.batch_windows; ++i) chunk.push_back(&windows[i % windows.size()]);
  const model::Batch batch = model::make_batch(chunk);
  std::mt19937_64 rng(model.config().seed);
  const model::StepNoise noise =
      model::draw_noise(rng, batch.rows(), model.config().horizon.delta, model.config().widths.latent_dim);

  const auto run = [&] {
    Tape tape(false);
    const auto fwd = model.forward(tape, batch, model::RolloutMode::kInfer, noise);
    return fwd.refined.value()[0];
  };
  volatile double sink = 0.0;
  for (std::size_t i = 0; i < options.warmup_batches; ++i) sink = sink + run();
  const auto t0 = std::chrono::steady_clock::now();
  for (std::size_t i = 0; i < options.timed_batches; ++i) sink = sink + run();
  const auto t1 = std::chrono::steady_clock::now();
  rep.seconds_per_batch =
      std::chrono::duration<double>(t1 - t0).count() / static_cast<double>(options.timed_batches);
  return rep;
}

}  // namespace csr::train
