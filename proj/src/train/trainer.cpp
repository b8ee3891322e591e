#include "csr/train/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "csr/error.hpp"

namespace csr::train {

TrainConfig TrainConfig::desk() {
  TrainConfig c;
  c.epochs = 200;
  c.batch_windows = 4;
  c.lr = 3e-3;
  return c;
}

void TrainConfig::validate() const {
  if (epochs == 0) throw UsageError("epochs must be >= 1");
  if (batch_windows == 0) throw UsageError("batch must be >= 1");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw UsageError("lr must be a positive number");
}

LossReport train_step(model::Model& model, const model::Batch& batch, const model::StepNoise& noise,
                      const diffnum::AdamConfig& adam) {
  Tape tape;
  const model::ForwardResult fwd = model.forward(tape, batch, model::RolloutMode::kTrain, noise);
  const TapeLosses losses = multitask_loss(tape, batch, fwd);
  const LossReport report = losses.report();
  if (!std::isfinite(report.total)) return report;
  tape.backward(losses.total);
  diffnum::adam_step(model.store(), adam);
  return report;
}

std::vector<EpochReport> train(model::Model& model, std::span<const scene::SceneWindow> windows,
                               const TrainConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (windows.empty()) throw DataError("no training windows");
  const auto& h = model.config().horizon;
  for (const auto& w : windows) {
    if (w.tau != h.tau || w.delta != h.delta) {
      throw DataError("training window horizon (" + std::to_string(w.tau) + ", " + std::to_string(w.delta) +
                      ") does not match the model");
    }
  }

  std::mt19937_64 rng(config.seed);
  diffnum::AdamConfig adam;
  adam.lr = config.lr;
  const std::size_t latent = model.config().widths.latent_dim;

  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<EpochReport> history;
  std::vector<const scene::SceneWindow*> chunk;

  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochReport rep;
    rep.epoch = epoch;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += config.batch_windows) {
      const std::size_t end = std::min(order.size(), begin + config.batch_windows);
      chunk.clear();
      for (std::size_t i = begin; i < end; ++i) chunk.push_back(&windows[order[i]]);
      const model::Batch batch = model::make_batch(chunk);
      const model::StepNoise noise = model::draw_noise(rng, batch.rows(), h.delta, latent);
      const LossReport l = train_step(model, batch, noise, adam);
      if (!std::isfinite(l.total)) {
        throw NumericError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                           std::to_string(batches));
      }
      rep.loss.l_ap += l.l_ap;
      rep.loss.l_kld += l.l_kld;
      rep.loss.l_r += l.l_r;
      rep.loss.total += l.total;
      ++batches;
    }
    const double n = static_cast<double>(batches);
    rep.loss.l_ap /= n;
    rep.loss.l_kld /= n;
    rep.loss.l_r /= n;
    rep.loss.total /= n;
    history.push_back(rep);
    if (on_epoch) on_epoch(rep);
  }
  return history;
}

}  // namespace csr::train
