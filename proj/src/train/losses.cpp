#include "csr/train/losses.hpp"

#include <cmath>

#include "csr/diffnum/ops.hpp"
#include "csr/error.hpp"

namespace csr::train {
namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* what) {
  if (a.shape() != b.shape() || a.shape().size() != 2 || a.cols() % 2 != 0) {
    throw UsageError(std::string(what) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

}  // namespace

Var loss_ap(Var gt, Var pred) {
  require_same_shape(gt.value(), pred.value(), "loss_ap");
  const double rows = static_cast<double>(gt.value().rows());
  return diffnum::scale(diffnum::sum(diffnum::square(diffnum::sub(gt, pred))), 1.0 / rows);
}

Var loss_kld(const std::vector<Var>& mu, const std::vector<Var>& log_var, std::size_t rows) {
  if (mu.empty() || mu.size() != log_var.size()) throw UsageError("loss_kld: need matching posteriors");
  if (rows == 0) throw UsageError("loss_kld: no rows");
  Var acc = diffnum::kl_standard_normal(mu[0], log_var[0]);
  for (std::size_t k = 1; k < mu.size(); ++k) {
    acc = diffnum::add(acc, diffnum::kl_standard_normal(mu[k], log_var[k]));
  }
  return diffnum::scale(acc, 1.0 / static_cast<double>(rows));
}

Var loss_r(Var gt, Var raw, Var offsets) {
  require_same_shape(gt.value(), raw.value(), "loss_r");
  require_same_shape(gt.value(), offsets.value(), "loss_r");
  const double rows = static_cast<double>(gt.value().rows());
  const Var residual = diffnum::sub(diffnum::sub(gt, raw), offsets);
  return diffnum::scale(diffnum::sum(diffnum::pair_norms(residual)), 1.0 / rows);
}

double loss_ap(const Tensor& gt, const Tensor& pred) {
  require_same_shape(gt, pred, "loss_ap");
  double acc = 0.0;
  for (std::size_t i = 0; i < gt.values().size(); ++i) {
    const double d = gt.values()[i] - pred.values()[i];
    acc += d * d;
  }
  return acc / static_cast<double>(gt.rows());
}

double loss_kld(const std::vector<Tensor>& mu, const std::vector<Tensor>& log_var) {
  if (mu.empty() || mu.size() != log_var.size()) throw UsageError("loss_kld: need matching posteriors");
  double acc = 0.0;
  for (std::size_t k = 0; k < mu.size(); ++k) {
    if (mu[k].shape() != log_var[k].shape()) throw UsageError("loss_kld: shape mismatch");
    for (std::size_t i = 0; i < mu[k].values().size(); ++i) {
      const double m = mu[k].values()[i], lv = log_var[k].values()[i];
      acc += 0.5 * (m * m + std::exp(lv) - 1.0 - lv);
    }
  }
  return acc / static_cast<double>(mu.front().rows());
}

double loss_r(const Tensor& gt, const Tensor& raw, const Tensor& offsets) {
  require_same_shape(gt, raw, "loss_r");
  require_same_shape(gt, offsets, "loss_r");
  double acc = 0.0;
  for (std::size_t r = 0; r < gt.rows(); ++r) {
    for (std::size_t c = 0; c < gt.cols(); c += 2) {
      acc += std::hypot(gt.at(r, c) - raw.at(r, c) - offsets.at(r, c),
                        gt.at(r, c + 1) - raw.at(r, c + 1) - offsets.at(r, c + 1));
    }
  }
  return acc / static_cast<double>(gt.rows());
}

LossReport TapeLosses::report() const {
  LossReport r;
  r.l_ap = l_ap.value().values()[0];
  r.l_kld = l_kld.value().values()[0];
  r.l_r = l_r.tape ? l_r.value().values()[0] : 0.0;
  r.total = total.value().values()[0];
  return r;
}

TapeLosses multitask_loss(Tape& tape, const model::Batch& batch, const model::ForwardResult& fwd) {
  if (fwd.raw.mu.empty()) throw UsageError("multitask_loss needs a training-mode forward pass");
  const Var gt = tape.constant(batch.future);
  TapeLosses out;
  out.l_ap = loss_ap(gt, fwd.raw.points);
  out.l_kld = loss_kld(fwd.raw.mu, fwd.raw.log_var, batch.rows());
  out.total = diffnum::add(out.l_ap, out.l_kld);
  if (fwd.refined_by_social) {
    out.l_r = loss_r(gt, fwd.refiner_input, fwd.offsets);
    out.total = diffnum::add(out.total, out.l_r);
  }
  return out;
}

}  // namespace csr::train
