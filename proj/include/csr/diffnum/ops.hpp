#pragma once

#include <span>
#include <vector>

#include "csr/diffnum/tape.hpp"
#include "csr/diffnum/tensor.hpp"

namespace csr::diffnum {

// y = x * w + b for x [rows, in], w [in, out], b [1, out].
Var linear(Var x, Var w, Var b);
Var relu(Var x);

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double s);
Var exp(Var a);
Var square(Var a);

// Sum of every element, as a [1, 1] scalar.
Var sum(Var a);

Var concat_cols(std::span<const Var> parts);
Var slice_cols(Var x, std::size_t begin, std::size_t count);

// Copy of x's value as a constant: gradients stop here.
Var stop_gradient(Var x);

// [rows, 2m] -> [rows, m]: Euclidean norm of each consecutive (x, y) pair.
// The derivative at a zero-length pair is taken as zero.
Var pair_norms(Var x);

// mu + exp(0.5 * log_var) * noise, elementwise over equal shapes.
Var sample_reparameterized(Var mu, Var log_var, Var noise);

// 0.5 * sum(mu^2 + exp(log_var) - 1 - log_var) over every element: the KL
// divergence of the diagonal Gaussians from N(0, I), summed over rows.
Var kl_standard_normal(Var mu, Var log_var);

// Row-wise softmax restricted to mask != 0. Masked entries are exactly 0.
// Every row needs at least one unmasked entry.
Var softmax_rows(Var x, const Tensor& mask);

// Value-level softmax of one row under a mask, shared with the attention
// layer. Unmasked weights sum to 1; the denominator is summed in sorted
// order so the result does not depend on the order of the entries.
void masked_softmax_row(std::span<const double> logits, std::span<const double> mask,
                        std::span<double> out);

// Sum of values independent of their order (sorted, then accumulated).
double ordered_sum(std::span<double> values);

}  // namespace csr::diffnum
