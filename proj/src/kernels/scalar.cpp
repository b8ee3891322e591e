#include <cmath>

#include "csr/kernels.hpp"

namespace csr::kernels {
namespace {

void linear_forward(const double* x, const double* w, const double* b,
                    double* y, std::size_t rows, std::size_t in,
                    std::size_t out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* xi = x + i * in;
    double* yi = y + i * out;
    for (std::size_t j = 0; j < out; ++j) yi[j] = b[j];
    for (std::size_t k = 0; k < in; ++k) {
      const double xk = xi[k];
      const double* wk = w + k * out;
      for (std::size_t j = 0; j < out; ++j) yi[j] = std::fma(xk, wk[j], yi[j]);
    }
  }
}

void linear_backward_weights(const double* x, const double* dy, double* dw,
                             double* db, std::size_t rows, std::size_t in,
                             std::size_t out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* xi = x + i * in;
    const double* dyi = dy + i * out;
    for (std::size_t k = 0; k < in; ++k) {
      const double xk = xi[k];
      if (xk == 0.0) continue;
      double* dwk = dw + k * out;
      for (std::size_t j = 0; j < out; ++j)
        dwk[j] = std::fma(xk, dyi[j], dwk[j]);
    }
    for (std::size_t j = 0; j < out; ++j) db[j] += dyi[j];
  }
}

void linear_backward_input(const double* dy, const double* w, double* dx,
                           std::size_t rows, std::size_t in, std::size_t out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* dyi = dy + i * out;
    double* dxi = dx + i * in;
    for (std::size_t k = 0; k < in; ++k) {
      const double* wk = w + k * out;
      double acc = 0.0;
      for (std::size_t j = 0; j < out; ++j) acc = std::fma(dyi[j], wk[j], acc);
      dxi[k] += acc;
    }
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::kScalar,          linear_forward,
                                 linear_backward_weights, linear_backward_input,
                                 axpy,                    dot};
  return table;
}

}  // namespace csr::kernels
