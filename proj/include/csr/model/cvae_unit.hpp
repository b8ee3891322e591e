#pragma once

#include <cstddef>
#include <random>
#include <string>

#include "csr/diffnum/mlp.hpp"
#include "csr/diffnum/param_store.hpp"
#include "csr/diffnum/tape.hpp"
#include "csr/model/config.hpp"

namespace csr::model {

using diffnum::Mlp;
using diffnum::ParamStore;
using diffnum::Tape;
using diffnum::Var;

// Output of one CVAE step. `mu` and `log_var` are only set in training.
struct StepPrediction {
  Var point;  // [N, 2]
  Var z;      // [N, latent_dim]
  Var mu;
  Var log_var;
  bool has_posterior = false;
};

// One conditional VAE that predicts the next point from an updated past of
// `input_points` points.
//
//   f_upast  = E_upast(updated_past)                      [N, feature]
//   f_point  = E_point(gt_point)                          [N, feature]  (train)
//   mu|lv    = E_latent(concat(f_upast, f_point))         [N, 2 latent] (train)
//   z        = mu + exp(lv / 2) * noise   (train)   or   noise  (infer)
//   point    = D_latent(concat(z, f_upast))               [N, 2]
//
// The first latent_dim outputs of E_latent are the mean, the rest the
// log-variance.
class CvaeUnit {
 public:
  CvaeUnit() = default;
  CvaeUnit(ParamStore& store, const std::string& prefix, std::size_t input_points,
           const NetworkWidths& widths, std::mt19937_64& rng);

  StepPrediction train_forward(Tape& tape, ParamStore& store, Var updated_past, Var gt_point,
                               Var noise) const;
  StepPrediction infer_forward(Tape& tape, ParamStore& store, Var updated_past, Var noise) const;

  std::size_t input_points() const { return input_points_; }
  std::size_t latent_dim() const { return latent_dim_; }
  std::size_t parameter_count() const;

  const Mlp& e_upast() const { return e_upast_; }
  const Mlp& e_point() const { return e_point_; }
  const Mlp& e_latent() const { return e_latent_; }
  const Mlp& d_latent() const { return d_latent_; }

  // Closed-form parameter count for a unit built from these widths.
  static std::size_t count_for(std::size_t input_points, const NetworkWidths& widths);

 private:
  Var decode(Tape& tape, ParamStore& store, Var z, Var f_upast) const;

  std::size_t input_points_ = 0;
  std::size_t latent_dim_ = 0;
  Mlp e_upast_;
  Mlp e_point_;
  Mlp e_latent_;
  Mlp d_latent_;
};

}  // namespace csr::model
