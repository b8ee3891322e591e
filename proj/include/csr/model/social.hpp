#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "csr/model/batch.hpp"
#include "csr/model/config.hpp"
#include "csr/model/cvae_unit.hpp"
#include "csr/scene/windows.hpp"

namespace csr::model {

// Binary pedestrian adjacency: m(i, j) = 1 iff the pedestrians' last observed
// points (scene coordinates) are within the mask radius. Symmetric with a
// unit diagonal.
struct SocialMask {
  std::size_t n = 0;
  std::vector<double> m;  // [n * n]

  double at(std::size_t i, std::size_t j) const { return m[i * n + j]; }
};

SocialMask build_mask(std::span<const scene::Point> last_observed, double radius);
SocialMask build_mask(const scene::SceneWindow& window, double radius);
// One mask per window of the batch.
std::vector<SocialMask> build_masks(const Batch& batch, double radius);

// Masked scaled dot-product attention applied independently within each
// window segment of the rows: logits = q k^T / sqrt(d), softmax over the
// unmasked entries of each row, output = attention * v. Sums over
// pedestrians are accumulated in sorted order so a permutation of the
// pedestrians permutes the output rows bitwise.
Var masked_attention(Var q, Var k, Var v, std::span<const SocialMask> masks,
                     std::span<const std::size_t> offsets);

// Offset regressor:
//   f_opast   = E_opast(past)                       [R, F]
//   f_pfuture = E_pfuture(raw)                      [R, F]
//   h         = proj(concat(f_opast, f_pfuture))    [R, F]   single linear layer
//   pooled    = attention(query(h), key(h), value(h))        single linear layers
//   f_st      = concat(h, pooled)                   [R, 2F]
//   offsets   = D_offsets(f_st)                     [R, 2 delta]
class SocialRefiner {
 public:
  SocialRefiner() = default;
  SocialRefiner(ParamStore& store, const Horizon& horizon, const NetworkWidths& widths,
                double mask_radius, std::mt19937_64& rng);

  // features [R, 2F] -> f_st [R, 2F]
  Var social_pool(Tape& tape, ParamStore& store, Var features, std::span<const SocialMask> masks,
                  std::span<const std::size_t> offsets) const;

  // Returns the offsets [R, 2 delta]. `raw` should already be detached from
  // the heads when training.
  Var refine(Tape& tape, ParamStore& store, Var past, Var raw, std::span<const SocialMask> masks,
             std::span<const std::size_t> offsets) const;

  double mask_radius() const { return mask_radius_; }
  std::size_t parameter_count() const;
  static std::size_t count_for(const Horizon& horizon, const NetworkWidths& widths);

  const Mlp& d_offsets() const { return d_offsets_; }

 private:
  double mask_radius_ = 2.0;
  Mlp e_opast_;
  Mlp e_pfuture_;
  Mlp proj_;
  Mlp query_;
  Mlp key_;
  Mlp value_;
  Mlp d_offsets_;
};

}  // namespace csr::model
