#include "csr/train/metrics.hpp"

#include <cmath>

#include "csr/error.hpp"

namespace csr::train {

Tensor step_errors(const Tensor& gt, const Tensor& pred) {
  if (gt.shape() != pred.shape() || gt.shape().size() != 2 || gt.cols() % 2 != 0) {
    throw UsageError("step_errors: shape mismatch " + gt.shape_string() + " vs " + pred.shape_string());
  }
  const std::size_t steps = gt.cols() / 2;
  Tensor out = Tensor::matrix(gt.rows(), steps);
  for (std::size_t r = 0; r < gt.rows(); ++r) {
    for (std::size_t t = 0; t < steps; ++t) {
      out.at(r, t) = std::hypot(gt.at(r, 2 * t) - pred.at(r, 2 * t), gt.at(r, 2 * t + 1) - pred.at(r, 2 * t + 1));
    }
  }
  return out;
}

double row_ade(const Tensor& errors, std::size_t row) {
  double acc = 0.0;
  for (std::size_t t = 0; t < errors.cols(); ++t) acc += errors.at(row, t);
  return acc / static_cast<double>(errors.cols());
}

double row_fde(const Tensor& errors, std::size_t row) { return errors.at(row, errors.cols() - 1); }

DisplacementErrors displacement_errors(const Tensor& errors) {
  DisplacementErrors out;
  const std::size_t rows = errors.rows(), steps = errors.cols();
  out.per_frame.assign(steps, 0.0);
  for (std::size_t r = 0; r < rows; ++r) {
    out.ade += row_ade(errors, r);
    out.fde += row_fde(errors, r);
    for (std::size_t t = 0; t < steps; ++t) out.per_frame[t] += errors.at(r, t);
  }
  const double n = static_cast<double>(rows);
  out.ade /= n;
  out.fde /= n;
  for (double& v : out.per_frame) v /= n;
  return out;
}

}  // namespace csr::train
