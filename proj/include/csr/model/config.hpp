#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace csr::model {

enum class HeadKind { kBaseline, kCascaded, kSlide };

HeadKind parse_head_kind(std::string_view name);
std::string_view head_kind_name(HeadKind kind);

// Observation horizon tau, prediction horizon delta, slide window alpha.
struct Horizon {
  std::size_t tau = 8;
  std::size_t delta = 12;
  std::size_t alpha = 8;

  void validate(HeadKind kind) const;
  friend bool operator==(const Horizon&, const Horizon&) = default;
};

// Widths of every sub-network. Input widths that come from the data (2t,
// 2 tau, 2 delta) are derived from the Horizon and are not listed here.
struct NetworkWidths {
  std::size_t feature_dim = 16;  // f_upast, f_point, f_opast, f_pfuture
  std::size_t latent_dim = 16;
  std::vector<std::size_t> e_upast_hidden{512, 256};
  std::vector<std::size_t> e_point_hidden{8, 16};
  std::vector<std::size_t> e_latent_hidden{8, 50};
  std::vector<std::size_t> d_latent_hidden{1024, 512, 1024};
  std::vector<std::size_t> e_opast_hidden{512, 256};
  std::vector<std::size_t> e_pfuture_hidden{512, 256};
  std::vector<std::size_t> d_offsets_hidden{1024, 512, 1024};

  // The published sub-network architecture.
  static NetworkWidths published() { return {}; }
  // Every width divided by `divisor`, but never below 2.
  NetworkWidths narrowed(std::size_t divisor) const;
  // Small preset for desk-scale training runs.
  static NetworkWidths desk();
  // "published", "desk" or "narrow<N>".
  static NetworkWidths preset(std::string_view name);

  void validate() const;
  friend bool operator==(const NetworkWidths&, const NetworkWidths&) = default;
};

struct ModelConfig {
  HeadKind head = HeadKind::kCascaded;
  bool refiner = true;
  Horizon horizon;
  NetworkWidths widths;
  double mask_radius = 2.0;
  bool teacher_forcing = false;
  std::uint64_t seed = 0;

  void validate() const;
};

}  // namespace csr::model
