#include "csr/diffnum/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csr/diffnum/gaussian.hpp"
#include "csr/error.hpp"
#include "csr/kernels.hpp"

namespace csr::diffnum {
namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw UsageError(std::string(op) + ": shape mismatch " + a.shape_string() +
                     " vs " + b.shape_string());
  }
}

void require_rank2(const Tensor& a, const char* op) {
  if (a.rank() != 2) throw UsageError(std::string(op) + ": needs a rank-2 tensor, got " + a.shape_string());
}

}  // namespace

Var linear(Var x, Var w, Var b) {
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = b.value();
  require_rank2(xv, "linear");
  require_rank2(wv, "linear");
  const std::size_t rows = xv.rows(), in = xv.cols(), out = wv.cols();
  if (wv.rows() != in) {
    throw UsageError("linear: input width " + std::to_string(in) +
                     " does not match weight shape " + wv.shape_string());
  }
  if (bv.size() != out) throw UsageError("linear: bias length mismatch");
  Tensor y = Tensor::matrix(rows, out);
  kernels::active().linear_forward(xv.data(), wv.data(), bv.data(), y.data(), rows, in, out);
  return x.tape->push(std::move(y), {x, w, b}, [x, w, b, rows, in, out](Tape& t, std::size_t self) {
    const auto& k = kernels::active();
    const Tensor& dy = t.grad(self);
    if (t.requires_grad(w) || t.requires_grad(b)) {
      Tensor& dw = t.grad(w.id);
      Tensor& db = t.grad(b.id);
      k.linear_backward_weights(t.value(x.id).data(), dy.data(), dw.data(), db.data(), rows, in, out);
    }
    if (t.requires_grad(x)) {
      k.linear_backward_input(dy.data(), t.value(w.id).data(), t.grad(x.id).data(), rows, in, out);
    }
  });
}

Var relu(Var x) {
  Tensor y = x.value();
  for (double& v : y.values()) {
    const bool on = v > 0.0;
    x.tape->note_activation(on);
    if (!on && !std::isnan(v)) v = 0.0;  // keep NaN visible
  }
  return x.tape->push(std::move(y), {x}, [x](Tape& t, std::size_t self) {
    const Tensor& xv = t.value(x.id);
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad(x.id);
    for (std::size_t i = 0; i < dx.size(); ++i) {
      if (xv[i] > 0.0) dx[i] += dy[i];
    }
  });
}

Var add(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "add");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += bv[i];
  return a.tape->push(std::move(y), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    const auto& k = kernels::active();
    if (t.requires_grad(a)) k.axpy(1.0, dy.data(), t.grad(a.id).data(), dy.size());
    if (t.requires_grad(b)) k.axpy(1.0, dy.data(), t.grad(b.id).data(), dy.size());
  });
}

Var sub(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "sub");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] -= bv[i];
  return a.tape->push(std::move(y), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    const auto& k = kernels::active();
    if (t.requires_grad(a)) k.axpy(1.0, dy.data(), t.grad(a.id).data(), dy.size());
    if (t.requires_grad(b)) k.axpy(-1.0, dy.data(), t.grad(b.id).data(), dy.size());
  });
}

Var mul(Var a, Var b) {
  require_same_shape(a.value(), b.value(), "mul");
  Tensor y = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] *= bv[i];
  return a.tape->push(std::move(y), {a, b}, [a, b](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    if (t.requires_grad(a)) {
      const Tensor& bv = t.value(b.id);
      Tensor& da = t.grad(a.id);
      for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i] * bv[i];
    }
    if (t.requires_grad(b)) {
      const Tensor& av = t.value(a.id);
      Tensor& db = t.grad(b.id);
      for (std::size_t i = 0; i < db.size(); ++i) db[i] += dy[i] * av[i];
    }
  });
}

Var scale(Var a, double s) {
  Tensor y = a.value();
  for (double& v : y.values()) v *= s;
  return a.tape->push(std::move(y), {a}, [a, s](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    kernels::active().axpy(s, dy.data(), t.grad(a.id).data(), dy.size());
  });
}

Var exp(Var a) {
  Tensor y = a.value();
  for (double& v : y.values()) v = std::exp(v);
  return a.tape->push(std::move(y), {a}, [a](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    const Tensor& yv = t.value(self);
    Tensor& da = t.grad(a.id);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += dy[i] * yv[i];
  });
}

Var square(Var a) {
  Tensor y = a.value();
  for (double& v : y.values()) v *= v;
  return a.tape->push(std::move(y), {a}, [a](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    const Tensor& av = t.value(a.id);
    Tensor& da = t.grad(a.id);
    for (std::size_t i = 0; i < da.size(); ++i) da[i] += 2.0 * av[i] * dy[i];
  });
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  return a.tape->push(Tensor::scalar(s), {a}, [a](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    for (double& v : t.grad(a.id).values()) v += g;
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw UsageError("concat_cols: nothing to concatenate");
  const std::size_t rows = parts[0].value().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const Var& p : parts) {
    if (p.value().rows() != rows) throw UsageError("concat_cols: row count mismatch");
    widths.push_back(p.value().cols());
    total += widths.back();
  }
  Tensor y = Tensor::matrix(rows, total);
  std::size_t offset = 0;
  for (std::size_t p = 0; p < parts.size(); ++p) {
    const Tensor& v = parts[p].value();
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(v.data() + r * widths[p], widths[p], y.data() + r * total + offset);
    }
    offset += widths[p];
  }
  std::vector<Var> inputs(parts.begin(), parts.end());
  return parts[0].tape->push(std::move(y), inputs, [inputs, widths, rows, total](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    std::size_t offset = 0;
    for (std::size_t p = 0; p < inputs.size(); ++p) {
      if (t.requires_grad(inputs[p])) {
        Tensor& dp = t.grad(inputs[p].id);
        for (std::size_t r = 0; r < rows; ++r) {
          const double* src = dy.data() + r * total + offset;
          double* dst = dp.data() + r * widths[p];
          for (std::size_t c = 0; c < widths[p]; ++c) dst[c] += src[c];
        }
      }
      offset += widths[p];
    }
  });
}

Var slice_cols(Var x, std::size_t begin, std::size_t count) {
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), cols = xv.cols();
  if (count == 0 || begin + count > cols) throw UsageError("slice_cols: range out of bounds");
  Tensor y = Tensor::matrix(rows, count);
  for (std::size_t r = 0; r < rows; ++r) {
    std::copy_n(xv.data() + r * cols + begin, count, y.data() + r * count);
  }
  return x.tape->push(std::move(y), {x}, [x, begin, count, rows, cols](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    Tensor& dx = t.grad(x.id);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < count; ++c) dx[r * cols + begin + c] += dy[r * count + c];
    }
  });
}

Var stop_gradient(Var x) { return x.tape->constant(x.value()); }

Var pair_norms(Var x) {
  const Tensor& xv = x.value();
  const std::size_t rows = xv.rows(), cols = xv.cols();
  if (cols % 2 != 0) throw UsageError("pair_norms: column count must be even");
  const std::size_t m = cols / 2;
  Tensor y = Tensor::matrix(rows, m);
  for (std::size_t i = 0; i < rows * m; ++i) y[i] = std::hypot(xv[2 * i], xv[2 * i + 1]);
  return x.tape->push(std::move(y), {x}, [x](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    const Tensor& yv = t.value(self);
    const Tensor& xv = t.value(x.id);
    Tensor& dx = t.grad(x.id);
    for (std::size_t i = 0; i < yv.size(); ++i) {
      if (yv[i] == 0.0) continue;
      dx[2 * i] += dy[i] * xv[2 * i] / yv[i];
      dx[2 * i + 1] += dy[i] * xv[2 * i + 1] / yv[i];
    }
  });
}

Var sample_reparameterized(Var mu, Var log_var, Var noise) {
  require_same_shape(mu.value(), log_var.value(), "sample_reparameterized");
  require_same_shape(mu.value(), noise.value(), "sample_reparameterized");
  Tensor y = mu.value();
  const Tensor& lv = log_var.value();
  const Tensor& eps = noise.value();
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += std::exp(0.5 * lv[i]) * eps[i];
  return mu.tape->push(std::move(y), {mu, log_var, noise}, [mu, log_var, noise](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    const Tensor& lv = t.value(log_var.id);
    const Tensor& eps = t.value(noise.id);
    if (t.requires_grad(mu)) kernels::active().axpy(1.0, dy.data(), t.grad(mu.id).data(), dy.size());
    if (t.requires_grad(log_var)) {
      Tensor& dlv = t.grad(log_var.id);
      for (std::size_t i = 0; i < dlv.size(); ++i) dlv[i] += dy[i] * 0.5 * std::exp(0.5 * lv[i]) * eps[i];
    }
    if (t.requires_grad(noise)) {
      Tensor& dn = t.grad(noise.id);
      for (std::size_t i = 0; i < dn.size(); ++i) dn[i] += dy[i] * std::exp(0.5 * lv[i]);
    }
  });
}

Var kl_standard_normal(Var mu, Var log_var) {
  require_same_shape(mu.value(), log_var.value(), "kl_standard_normal");
  const Tensor& m = mu.value();
  const Tensor& lv = log_var.value();
  double s = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) s += m[i] * m[i] + std::exp(lv[i]) - 1.0 - lv[i];
  return mu.tape->push(Tensor::scalar(0.5 * s), {mu, log_var}, [mu, log_var](Tape& t, std::size_t self) {
    const double g = t.grad(self)[0];
    if (t.requires_grad(mu)) {
      const Tensor& m = t.value(mu.id);
      Tensor& dm = t.grad(mu.id);
      for (std::size_t i = 0; i < dm.size(); ++i) dm[i] += g * m[i];
    }
    if (t.requires_grad(log_var)) {
      const Tensor& lv = t.value(log_var.id);
      Tensor& dlv = t.grad(log_var.id);
      for (std::size_t i = 0; i < dlv.size(); ++i) dlv[i] += g * 0.5 * (std::exp(lv[i]) - 1.0);
    }
  });
}

double ordered_sum(std::span<double> values) {
  // sorting NaN breaks the ordering contract
  for (double v : values) {
    if (std::isnan(v)) return v;
  }
  std::sort(values.begin(), values.end());
  double s = 0.0;
  for (double v : values) s += v;
  return s;
}

void masked_softmax_row(std::span<const double> logits, std::span<const double> mask,
                        std::span<double> out) {
  const std::size_t m = logits.size();
  double peak = -std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t j = 0; j < m; ++j) {
    if (mask[j] == 0.0) continue;
    any = true;
    if (std::isnan(logits[j]) || logits[j] > peak) peak = logits[j];
    if (std::isnan(peak)) break;
  }
  if (!any) {
    throw UsageError("masked softmax: row has no unmasked entry");
  }
  std::vector<double> terms;
  terms.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    if (mask[j] != 0.0) {
      out[j] = std::exp(logits[j] - peak);
      terms.push_back(out[j]);
    } else {
      out[j] = 0.0;
    }
  }
  const double denom = ordered_sum(terms);
  for (std::size_t j = 0; j < m; ++j) {
    if (mask[j] != 0.0) out[j] /= denom;
  }
}

Var softmax_rows(Var x, const Tensor& mask) {
  const Tensor& xv = x.value();
  require_same_shape(xv, mask, "softmax_rows");
  const std::size_t rows = xv.rows(), cols = xv.cols();
  Tensor y = Tensor::matrix(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) masked_softmax_row(xv.row(r), mask.row(r), y.row(r));
  return x.tape->push(std::move(y), {x}, [x, rows, cols](Tape& t, std::size_t self) {
    const Tensor& dy = t.grad(self);
    const Tensor& yv = t.value(self);
    Tensor& dx = t.grad(x.id);
    for (std::size_t r = 0; r < rows; ++r) {
      double inner = 0.0;
      for (std::size_t c = 0; c < cols; ++c) inner += yv.at(r, c) * dy.at(r, c);
      for (std::size_t c = 0; c < cols; ++c) dx.at(r, c) += yv.at(r, c) * (dy.at(r, c) - inner);
    }
  });
}

}  // namespace csr::diffnum

namespace csr::diffnum {

namespace {
void require_valid(const LatentGaussian& g) {
  if (g.mu.size() != g.log_var.size()) {
    throw UsageError("latent gaussian: mu and log_var lengths differ");
  }
}
}  // namespace

std::vector<double> sample_reparameterized(const LatentGaussian& g,
                                           std::span<const double> noise) {
  require_valid(g);
  if (noise.size() != g.mu.size()) throw UsageError("sample_reparameterized: noise length mismatch");
  std::vector<double> z(g.mu.size());
  for (std::size_t i = 0; i < z.size(); ++i) z[i] = g.mu[i] + std::exp(0.5 * g.log_var[i]) * noise[i];
  return z;
}

double kl_standard_normal(const LatentGaussian& g) {
  require_valid(g);
  double s = 0.0;
  for (std::size_t i = 0; i < g.mu.size(); ++i) {
    s += g.mu[i] * g.mu[i] + std::exp(g.log_var[i]) - 1.0 - g.log_var[i];
  }
  return 0.5 * s;
}

}  // namespace csr::diffnum
