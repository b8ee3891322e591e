#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace csr::diffnum {

// Dense row-major array of doubles. Most of the library works with rank-2
// tensors ([rows, cols]); a scalar is [1, 1].
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<std::size_t> shape, double fill = 0.0);
  Tensor(std::vector<std::size_t> shape, std::vector<double> data);

  static Tensor matrix(std::size_t rows, std::size_t cols, double fill = 0.0) {
    return Tensor({rows, cols}, fill);
  }
  static Tensor from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor scalar(double v) { return Tensor({1, 1}, v); }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols(), cols()}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols(), cols()};
  }

  // Same data, new shape with identical element count.
  Tensor reshaped(std::vector<std::size_t> shape) const;

  void fill(double v);
  bool all_finite() const;
  std::string shape_string() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

std::string shape_to_string(const std::vector<std::size_t>& shape);

}  // namespace csr::diffnum
