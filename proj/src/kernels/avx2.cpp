#include <immintrin.h>

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
    std::size_t j = 0;
    for (; j + 16 <= out; j += 16) {
      __m256d acc0 = _mm256_loadu_pd(b + j);
      __m256d acc1 = _mm256_loadu_pd(b + j + 4);
      __m256d acc2 = _mm256_loadu_pd(b + j + 8);
      __m256d acc3 = _mm256_loadu_pd(b + j + 12);
      for (std::size_t k = 0; k < in; ++k) {
        const __m256d xk = _mm256_broadcast_sd(xi + k);
        const double* wk = w + k * out + j;
        acc0 = _mm256_fmadd_pd(xk, _mm256_loadu_pd(wk), acc0);
        acc1 = _mm256_fmadd_pd(xk, _mm256_loadu_pd(wk + 4), acc1);
        acc2 = _mm256_fmadd_pd(xk, _mm256_loadu_pd(wk + 8), acc2);
        acc3 = _mm256_fmadd_pd(xk, _mm256_loadu_pd(wk + 12), acc3);
      }
      _mm256_storeu_pd(yi + j, acc0);
      _mm256_storeu_pd(yi + j + 4, acc1);
      _mm256_storeu_pd(yi + j + 8, acc2);
      _mm256_storeu_pd(yi + j + 12, acc3);
    }
    for (; j + 4 <= out; j += 4) {
      __m256d acc = _mm256_loadu_pd(b + j);
      for (std::size_t k = 0; k < in; ++k) {
        acc = _mm256_fmadd_pd(_mm256_broadcast_sd(xi + k),
                              _mm256_loadu_pd(w + k * out + j), acc);
      }
      _mm256_storeu_pd(yi + j, acc);
    }
    for (; j < out; ++j) {
      double acc = b[j];
      for (std::size_t k = 0; k < in; ++k)
        acc = std::fma(xi[k], w[k * out + j], acc);
      yi[j] = acc;
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
      if (xk == 0.0) continue;  // ReLU outputs are often exactly zero
      const __m256d xv = _mm256_set1_pd(xk);
      double* dwk = dw + k * out;
      std::size_t j = 0;
      for (; j + 4 <= out; j += 4) {
        _mm256_storeu_pd(dwk + j,
                         _mm256_fmadd_pd(xv, _mm256_loadu_pd(dyi + j),
                                         _mm256_loadu_pd(dwk + j)));
      }
      for (; j < out; ++j) dwk[j] = std::fma(xk, dyi[j], dwk[j]);
    }
    std::size_t j = 0;
    for (; j + 4 <= out; j += 4) {
      _mm256_storeu_pd(db + j, _mm256_add_pd(_mm256_loadu_pd(db + j),
                                             _mm256_loadu_pd(dyi + j)));
    }
    for (; j < out; ++j) db[j] += dyi[j];
  }
}

double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4),
                           _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc = std::fma(a[i], b[i], acc);
  return acc;
}

void linear_backward_input(const double* dy, const double* w, double* dx,
                           std::size_t rows, std::size_t in, std::size_t out) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double* dyi = dy + i * out;
    double* dxi = dx + i * in;
    for (std::size_t k = 0; k < in; ++k) dxi[k] += dot(dyi, w + k * out, out);
  }
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i),
                                            _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] = std::fma(a, x[i], y[i]);
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::kAvx2,            linear_forward,
                                 linear_backward_weights, linear_backward_input,
                                 axpy,                    dot};
  return table;
}

}  // namespace csr::kernels
