#include "csr/model/cvae_unit.hpp"

#include <array>

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

struct UnitSpecs {
  MlpSpec e_upast, e_point, e_latent, d_latent;
};

UnitSpecs unit_specs(std::size_t input_points, const NetworkWidths& w) {
  return {chain(2 * input_points, w.e_upast_hidden, w.feature_dim),
          chain(2, w.e_point_hidden, w.feature_dim),
          chain(2 * w.feature_dim, w.e_latent_hidden, 2 * w.latent_dim),
          chain(w.latent_dim + w.feature_dim, w.d_latent_hidden, 2)};
}

}  // namespace

CvaeUnit::CvaeUnit(ParamStore& store, const std::string& prefix, std::size_t input_points,
                   const NetworkWidths& widths, std::mt19937_64& rng)
    : input_points_(input_points), latent_dim_(widths.latent_dim) {
  if (input_points == 0) throw UsageError("cvae unit needs at least one input point");
  UnitSpecs s = unit_specs(input_points, widths);
  e_upast_ = Mlp(store, prefix + ".e_upast", s.e_upast, rng);
  e_point_ = Mlp(store, prefix + ".e_point", s.e_point, rng);
  e_latent_ = Mlp(store, prefix + ".e_latent", s.e_latent, rng);
  d_latent_ = Mlp(store, prefix + ".d_latent", s.d_latent, rng);
}

std::size_t CvaeUnit::count_for(std::size_t input_points, const NetworkWidths& widths) {
  const UnitSpecs s = unit_specs(input_points, widths);
  return s.e_upast.parameter_count() + s.e_point.parameter_count() +
         s.e_latent.parameter_count() + s.d_latent.parameter_count();
}

std::size_t CvaeUnit::parameter_count() const {
  return e_upast_.spec().parameter_count() + e_point_.spec().parameter_count() +
         e_latent_.spec().parameter_count() + d_latent_.spec().parameter_count();
}

Var CvaeUnit::decode(Tape& tape, ParamStore& store, Var z, Var f_upast) const {
  const std::array<Var, 2> parts{z, f_upast};
  return d_latent_.forward(tape, store, diffnum::concat_cols(parts));
}

StepPrediction CvaeUnit::train_forward(Tape& tape, ParamStore& store, Var updated_past,
                                       Var gt_point, Var noise) const {
  if (noise.value().cols() != latent_dim_) throw UsageError("cvae unit: noise width mismatch");
  const Var f_upast = e_upast_.forward(tape, store, updated_past);
  const Var f_point = e_point_.forward(tape, store, gt_point);
  const std::array<Var, 2> cond{f_upast, f_point};
  const Var stats = e_latent_.forward(tape, store, diffnum::concat_cols(cond));
  StepPrediction out;
  out.mu = diffnum::slice_cols(stats, 0, latent_dim_);
  out.log_var = diffnum::slice_cols(stats, latent_dim_, latent_dim_);
  out.z = diffnum::sample_reparameterized(out.mu, out.log_var, noise);
  out.point = decode(tape, store, out.z, f_upast);
  out.has_posterior = true;
  return out;
}

StepPrediction CvaeUnit::infer_forward(Tape& tape, ParamStore& store, Var updated_past,
                                       Var noise) const {
  if (noise.value().cols() != latent_dim_) throw UsageError("cvae unit: noise width mismatch");
  const Var f_upast = e_upast_.forward(tape, store, updated_past);
  StepPrediction out;
  out.z = noise;
  out.point = decode(tape, store, noise, f_upast);
  return out;
}

}  // namespace csr::model
