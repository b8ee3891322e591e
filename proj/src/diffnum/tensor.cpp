#include "csr/diffnum/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "csr/error.hpp"

namespace csr::diffnum {
namespace {

std::size_t element_count(const std::vector<std::size_t>& shape) {
  if (shape.empty()) throw UsageError("tensor shape must not be empty");
  for (std::size_t d : shape) {
    if (d == 0) throw UsageError("tensor extents must be positive: " + shape_to_string(shape));
  }
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

}  // namespace

std::string shape_to_string(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

Tensor::Tensor(std::vector<std::size_t> shape, double fill)
    : shape_(std::move(shape)), data_(element_count(shape_), fill) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (element_count(shape_) != data_.size()) {
    throw UsageError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_to_string(shape_));
  }
}

Tensor Tensor::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  if (rows.size() == 0) throw UsageError("from_rows needs at least one row");
  const std::size_t cols = rows.begin()->size();
  std::vector<double> data;
  data.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw UsageError("ragged rows in from_rows");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({rows.size(), cols}, std::move(data));
}

std::size_t Tensor::rows() const {
  if (shape_.size() != 2) throw UsageError("rows() needs a rank-2 tensor, got " + shape_string());
  return shape_[0];
}

std::size_t Tensor::cols() const {
  if (shape_.size() != 2) throw UsageError("cols() needs a rank-2 tensor, got " + shape_string());
  return shape_[1];
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
  return Tensor(std::move(shape), data_);
}

void Tensor::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](double v) { return std::isfinite(v); });
}

std::string Tensor::shape_string() const { return shape_to_string(shape_); }

}  // namespace csr::diffnum
