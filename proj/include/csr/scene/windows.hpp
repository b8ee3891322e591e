#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "csr/scene/scene.hpp"

namespace csr::scene {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

// One prediction instance: N pedestrians co-present for tau + delta samples.
//
// Coordinates in `past` and `future` are anchored per pedestrian: the last
// observed point is translated to the origin. `anchor` holds that point in
// scene coordinates and `absolute_past` the untranslated observations.
// Per-pedestrian arrays are flattened pedestrian-major.
struct SceneWindow {
  std::string scene_id;
  std::int64_t start_frame = 0;
  std::size_t tau = 0;
  std::size_t delta = 0;
  std::vector<std::int64_t> peds;
  std::vector<Point> past;           // [N * tau]
  std::vector<Point> future;         // [N * delta]
  std::vector<Point> anchor;         // [N]
  std::vector<Point> absolute_past;  // [N * tau]

  std::size_t size() const { return peds.size(); }
  const Point& past_at(std::size_t ped, std::size_t t) const { return past[ped * tau + t]; }
  const Point& future_at(std::size_t ped, std::size_t t) const { return future[ped * delta + t]; }
  Point& past_at(std::size_t ped, std::size_t t) { return past[ped * tau + t]; }
  Point& future_at(std::size_t ped, std::size_t t) { return future[ped * delta + t]; }

  // Window restricted to / reordered by the given pedestrian indices.
  SceneWindow select(const std::vector<std::size_t>& order) const;
};

// Builds a window from absolute tracks [N][tau + delta], anchoring each
// pedestrian at its last observed point.
SceneWindow make_window(std::string scene_id, std::int64_t start_frame, std::size_t tau,
                        std::size_t delta, std::vector<std::int64_t> peds,
                        const std::vector<std::vector<Point>>& tracks);

// Candidate start frames are min_frame + s * stride * frame_step. A window is
// emitted for a start frame when at least one pedestrian has a record at
// every one of its tau + delta sample frames; pedestrians missing any of
// those frames are left out of that window.
std::vector<SceneWindow> extract_windows(const TrajectoryScene& scene, std::size_t tau,
                                         std::size_t delta, std::size_t stride = 1);

}  // namespace csr::scene
