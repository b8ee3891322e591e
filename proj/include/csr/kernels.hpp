#pragma once

// Dense row-major kernels behind every linear layer.
//
// Each kernel exists as a scalar reference and, on x86-64, as an AVX2/FMA
// variant. The active table is chosen once at startup from CPUID and can be
// pinned to the scalar reference with CSR_FORCE_SCALAR=1 in the environment.
//
// Layout conventions (all row-major):
//   x  [rows, in]     w  [in, out]     b  [out]     y  [rows, out]
//
// linear_forward and linear_backward_weights perform the same sequence of
// fused multiply-adds per output element in both variants, so they agree
// bitwise. linear_backward_input and dot reduce along a row and are only
// equal up to summation order.

#include <cstddef>
#include <string_view>

namespace csr::kernels {

enum class Isa { kScalar, kAvx2 };

struct KernelTable {
  Isa isa;
  // y = x * w + b
  void (*linear_forward)(const double* x, const double* w, const double* b,
                         double* y, std::size_t rows, std::size_t in,
                         std::size_t out);
  // dw += x^T * dy, db += colsum(dy)
  void (*linear_backward_weights)(const double* x, const double* dy,
                                  double* dw, double* db, std::size_t rows,
                                  std::size_t in, std::size_t out);
  // dx += dy * w^T
  void (*linear_backward_input)(const double* dy, const double* w, double* dx,
                                std::size_t rows, std::size_t in,
                                std::size_t out);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the AVX2 variant was not compiled in or the CPU lacks it.
const KernelTable* avx2_table();

// The table used by the rest of the library.
const KernelTable& active();

std::string_view isa_name(Isa isa);

}  // namespace csr::kernels
