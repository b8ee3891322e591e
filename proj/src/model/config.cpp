#include "csr/model/config.hpp"

#include <algorithm>
#include <charconv>

#include "csr/error.hpp"

namespace csr::model {

HeadKind parse_head_kind(std::string_view name) {
  if (name == "baseline") return HeadKind::kBaseline;
  if (name == "cascaded") return HeadKind::kCascaded;
  if (name == "slide") return HeadKind::kSlide;
  throw UsageError("unknown head kind '" + std::string(name) + "' (baseline, cascaded, slide)");
}

std::string_view head_kind_name(HeadKind kind) {
  switch (kind) {
    case HeadKind::kBaseline:
      return "baseline";
    case HeadKind::kCascaded:
      return "cascaded";
    case HeadKind::kSlide:
      return "slide";
  }
  return "unknown";
}

void Horizon::validate(HeadKind kind) const {
  if (tau == 0 || delta == 0) throw UsageError("tau and delta must be >= 1");
  if (kind == HeadKind::kSlide) {
    if (alpha == 0) throw UsageError("alpha must be >= 1");
    if (alpha > tau) {
      throw UsageError("slide head needs alpha <= tau (alpha=" + std::to_string(alpha) +
                       ", tau=" + std::to_string(tau) + ")");
    }
  }
}

NetworkWidths NetworkWidths::narrowed(std::size_t divisor) const {
  if (divisor == 0) throw UsageError("narrowing divisor must be >= 1");
  const auto shrink = [divisor](std::size_t w) { return std::max<std::size_t>(2, w / divisor); };
  const auto shrink_all = [&](std::vector<std::size_t> v) {
    for (auto& w : v) w = shrink(w);
    return v;
  };
  NetworkWidths n;
  n.feature_dim = shrink(feature_dim);
  n.latent_dim = shrink(latent_dim);
  n.e_upast_hidden = shrink_all(e_upast_hidden);
  n.e_point_hidden = shrink_all(e_point_hidden);
  n.e_latent_hidden = shrink_all(e_latent_hidden);
  n.d_latent_hidden = shrink_all(d_latent_hidden);
  n.e_opast_hidden = shrink_all(e_opast_hidden);
  n.e_pfuture_hidden = shrink_all(e_pfuture_hidden);
  n.d_offsets_hidden = shrink_all(d_offsets_hidden);
  return n;
}

NetworkWidths NetworkWidths::desk() { return published().narrowed(4); }

NetworkWidths NetworkWidths::preset(std::string_view name) {
  if (name == "published") return published();
  if (name == "desk") return desk();
  if (name.starts_with("narrow")) {
    const std::string_view digits = name.substr(6);
    std::size_t d = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && d > 0) return published().narrowed(d);
  }
  throw UsageError("unknown width preset '" + std::string(name) + "' (published, desk, narrow<N>)");
}

void NetworkWidths::validate() const {
  if (feature_dim == 0 || latent_dim == 0) throw UsageError("feature and latent widths must be >= 1");
  for (const auto* v : {&e_upast_hidden, &e_point_hidden, &e_latent_hidden, &d_latent_hidden,
                        &e_opast_hidden, &e_pfuture_hidden, &d_offsets_hidden}) {
    for (std::size_t w : *v) {
      if (w == 0) throw UsageError("hidden widths must be >= 1");
    }
  }
}

void ModelConfig::validate() const {
  horizon.validate(head);
  widths.validate();
  if (!(mask_radius > 0.0)) throw UsageError("mask radius must be > 0");
}

}  // namespace csr::model
