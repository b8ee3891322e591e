#include "csr/model/social.hpp"

#include <array>
#include <cmath>
#include <memory>

#include "csr/diffnum/ops.hpp"
#include "csr/error.hpp"

namespace csr::model {
namespace {

using diffnum::MlpSpec;

MlpSpec chain(std::size_t in, const std::vector<std::size_t>& hidden, std::size_t out) {
  MlpSpec s;
  s.layer_widths.push_back(in);
  s.layer_widths.insert(s.layer_widths.end(), hidden.begin(), hidden.end());
  s.layer_widths.push_back(out);
  return s;
}

struct RefinerSpecs {
  MlpSpec e_opast, e_pfuture, proj, query, key, value, d_offsets;
};

RefinerSpecs refiner_specs(const Horizon& h, const NetworkWidths& w) {
  const std::size_t f = w.feature_dim;
  return {chain(2 * h.tau, w.e_opast_hidden, f),
          chain(2 * h.delta, w.e_pfuture_hidden, f),
          MlpSpec{{2 * f, f}},
          MlpSpec{{f, f}},
          MlpSpec{{f, f}},
          MlpSpec{{f, f}},
          chain(2 * f, w.d_offsets_hidden, 2 * h.delta)};
}

}  // namespace

SocialMask build_mask(std::span<const scene::Point> last, double radius) {
  if (!(radius > 0.0)) throw UsageError("social mask radius must be > 0");
  SocialMask mask;
  mask.n = last.size();
  mask.m.assign(mask.n * mask.n, 0.0);
  for (std::size_t i = 0; i < mask.n; ++i) {
    for (std::size_t j = 0; j < mask.n; ++j) {
      const double d = std::hypot(last[i].x - last[j].x, last[i].y - last[j].y);
      mask.m[i * mask.n + j] = (i == j || d <= radius) ? 1.0 : 0.0;
    }
  }
  return mask;
}

SocialMask build_mask(const scene::SceneWindow& window, double radius) {
  std::vector<scene::Point> last;
  last.reserve(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    last.push_back(window.absolute_past[i * window.tau + window.tau - 1]);
  }
  return build_mask(last, radius);
}

std::vector<SocialMask> build_masks(const Batch& batch, double radius) {
  std::vector<SocialMask> masks;
  masks.reserve(batch.windows());
  for (std::size_t w = 0; w < batch.windows(); ++w) {
    std::vector<scene::Point> last;
    for (std::size_t r = batch.offsets[w]; r < batch.offsets[w + 1]; ++r) {
      last.push_back({batch.last_abs.at(r, 0), batch.last_abs.at(r, 1)});
    }
    masks.push_back(build_mask(last, radius));
  }
  return masks;
}

Var masked_attention(Var q, Var k, Var v, std::span<const SocialMask> masks,
                     std::span<const std::size_t> offsets) {
  const Tensor& qv = q.value();
  const Tensor& kv = k.value();
  const Tensor& vv = v.value();
  const std::size_t rows = qv.rows(), d = qv.cols(), dv = vv.cols();
  if (kv.rows() != rows || vv.rows() != rows || kv.cols() != d) {
    throw UsageError("masked_attention: q/k/v shapes disagree");
  }
  if (offsets.size() != masks.size() + 1 || offsets.front() != 0 || offsets.back() != rows) {
    throw UsageError("masked_attention: segment offsets do not cover the rows");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));

  // Attention weights, one n x n block per segment, kept for the backward pass.
  auto weights = std::make_shared<std::vector<double>>();
  Tensor out = Tensor::matrix(rows, dv);
  std::vector<double> logits, row, terms;
  for (std::size_t s = 0; s < masks.size(); ++s) {
    const std::size_t base = offsets[s];
    const std::size_t n = offsets[s + 1] - base;
    const SocialMask& mask = masks[s];
    if (mask.n != n) throw UsageError("masked_attention: mask size does not match segment");
    logits.assign(n, 0.0);
    row.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (mask.at(i, j) == 0.0) continue;
        double acc = 0.0;
        for (std::size_t c = 0; c < d; ++c) acc += qv.at(base + i, c) * kv.at(base + j, c);
        logits[j] = acc * scale;
      }
      diffnum::masked_softmax_row(logits, std::span<const double>(mask.m.data() + i * n, n), row);
      weights->insert(weights->end(), row.begin(), row.end());
      for (std::size_t c = 0; c < dv; ++c) {
        terms.clear();
        for (std::size_t j = 0; j < n; ++j) {
          if (mask.at(i, j) != 0.0) terms.push_back(row[j] * vv.at(base + j, c));
        }
        out.at(base + i, c) = diffnum::ordered_sum(terms);
      }
    }
  }

  std::vector<SocialMask> mask_copy(masks.begin(), masks.end());
  std::vector<std::size_t> offset_copy(offsets.begin(), offsets.end());
  return q.tape->push(
      std::move(out), {q, k, v},
      [q, k, v, weights, mask_copy = std::move(mask_copy), offset_copy = std::move(offset_copy), d, dv,
       scale](diffnum::Tape& t, std::size_t self) {
        const Tensor& dout = t.grad(self);
        const Tensor& qv = t.value(q.id);
        const Tensor& kv = t.value(k.id);
        const Tensor& vv = t.value(v.id);
        Tensor* dq = t.requires_grad(q) ? &t.grad(q.id) : nullptr;
        Tensor* dk = t.requires_grad(k) ? &t.grad(k.id) : nullptr;
        Tensor* dvv = t.requires_grad(v) ? &t.grad(v.id) : nullptr;
        std::size_t wpos = 0;
        std::vector<double> da;
        for (std::size_t s = 0; s < mask_copy.size(); ++s) {
          const std::size_t base = offset_copy[s];
          const std::size_t n = offset_copy[s + 1] - base;
          const SocialMask& mask = mask_copy[s];
          for (std::size_t i = 0; i < n; ++i, wpos += n) {
            const double* a = weights->data() + wpos;
            da.assign(n, 0.0);
            double inner = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
              if (mask.at(i, j) == 0.0) continue;
              double acc = 0.0;
              for (std::size_t c = 0; c < dv; ++c) acc += dout.at(base + i, c) * vv.at(base + j, c);
              da[j] = acc;
              inner += a[j] * acc;
              if (dvv) {
                for (std::size_t c = 0; c < dv; ++c) dvv->at(base + j, c) += a[j] * dout.at(base + i, c);
              }
            }
            for (std::size_t j = 0; j < n; ++j) {
              if (mask.at(i, j) == 0.0) continue;
              const double dl = a[j] * (da[j] - inner) * scale;
              if (dq) {
                for (std::size_t c = 0; c < d; ++c) dq->at(base + i, c) += dl * kv.at(base + j, c);
              }
              if (dk) {
                for (std::size_t c = 0; c < d; ++c) dk->at(base + j, c) += dl * qv.at(base + i, c);
              }
            }
          }
        }
      });
}

SocialRefiner::SocialRefiner(ParamStore& store, const Horizon& horizon, const NetworkWidths& widths,
                             double mask_radius, std::mt19937_64& rng)
    : mask_radius_(mask_radius) {
  if (!(mask_radius > 0.0)) throw UsageError("mask radius must be > 0");
  RefinerSpecs s = refiner_specs(horizon, widths);
  e_opast_ = Mlp(store, "refiner.e_opast", s.e_opast, rng);
  e_pfuture_ = Mlp(store, "refiner.e_pfuture", s.e_pfuture, rng);
  proj_ = Mlp(store, "refiner.se.proj", s.proj, rng);
  query_ = Mlp(store, "refiner.se.query", s.query, rng);
  key_ = Mlp(store, "refiner.se.key", s.key, rng);
  value_ = Mlp(store, "refiner.se.value", s.value, rng);
  d_offsets_ = Mlp(store, "refiner.d_offsets", s.d_offsets, rng);
}

std::size_t SocialRefiner::count_for(const Horizon& horizon, const NetworkWidths& widths) {
  const RefinerSpecs s = refiner_specs(horizon, widths);
  return s.e_opast.parameter_count() + s.e_pfuture.parameter_count() + s.proj.parameter_count() +
         s.query.parameter_count() + s.key.parameter_count() + s.value.parameter_count() +
         s.d_offsets.parameter_count();
}

std::size_t SocialRefiner::parameter_count() const {
  std::size_t n = 0;
  for (const Mlp* m : {&e_opast_, &e_pfuture_, &proj_, &query_, &key_, &value_, &d_offsets_}) {
    n += m->spec().parameter_count();
  }
  return n;
}

Var SocialRefiner::social_pool(Tape& tape, ParamStore& store, Var features,
                               std::span<const SocialMask> masks,
                               std::span<const std::size_t> offsets) const {
  const Var h = proj_.forward(tape, store, features);
  const Var pooled = masked_attention(query_.forward(tape, store, h), key_.forward(tape, store, h),
                                      value_.forward(tape, store, h), masks, offsets);
  const std::array<Var, 2> parts{h, pooled};
  return diffnum::concat_cols(parts);
}

Var SocialRefiner::refine(Tape& tape, ParamStore& store, Var past, Var raw,
                          std::span<const SocialMask> masks, std::span<const std::size_t> offsets) const {
  const std::array<Var, 2> parts{e_opast_.forward(tape, store, past), e_pfuture_.forward(tape, store, raw)};
  const Var f_st = social_pool(tape, store, diffnum::concat_cols(parts), masks, offsets);
  return d_offsets_.forward(tape, store, f_st);
}

}  // namespace csr::model
