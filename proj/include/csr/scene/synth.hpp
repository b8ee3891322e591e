#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "csr/kv_config.hpp"
#include "csr/scene/scene.hpp"

namespace csr::scene {

// Synthetic scene generator settings. Archetype counts are per scene.
// Distances are in scene units per sample.
struct SynthConfig {
  std::size_t scenes = 1;
  std::size_t walkers = 0;          // constant-velocity straight lines
  std::size_t turners = 0;          // straight, then a constant-rate turn
  std::size_t crossing_pairs = 0;   // two paths crossing near the same time
  std::size_t avoidance_pairs = 0;  // head-on approach with mutual swerve
  double noise_sigma = 0.0;
  double speed_min = 0.3;
  double speed_max = 0.6;
  double mask_radius = 2.0;
  std::size_t track_length = 20;
  std::int64_t frame_step = 10;
  double cell_spacing = 50.0;  // instances are laid out this far apart

  std::size_t instances_per_scene() const {
    return walkers + turners + crossing_pairs + avoidance_pairs;
  }
  // UsageError on invalid counts or ranges.
  void validate() const;
};

// Keys: scenes, walkers, turners, crossing-pairs, avoidance-pairs,
// noise-sigma, speed-min, speed-max, mask-radius, track-length, frame-step,
// cell-spacing. Unknown keys are rejected.
SynthConfig synth_config_from(KeyValues kv);
KeyValues synth_config_to_kv(const SynthConfig& c);

// Scenes are named synth_000, synth_001, ... Identical (config, seed) give
// identical output.
std::vector<TrajectoryScene> synth_scenes(const SynthConfig& config, std::uint64_t seed);

}  // namespace csr::scene
