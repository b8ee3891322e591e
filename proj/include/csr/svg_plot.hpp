#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "csr/scene/windows.hpp"

namespace csr {

enum class TrackRole { kPast, kTruth, kRaw, kRefined };

const char* track_role_name(TrackRole role);

struct PlotTrack {
  std::size_t ped = 0;
  TrackRole role = TrackRole::kPast;
  std::vector<scene::Point> points;  // scene coordinates
};

// Scene to SVG mapping: u = scale * x + offset_x, v = offset_y - scale * y.
struct Viewport {
  double width = 640.0;
  double height = 640.0;
  double scale = 1.0;
  double offset_x = 0.0;
  double offset_y = 0.0;

  scene::Point to_svg(scene::Point p) const { return {scale * p.x + offset_x, offset_y - scale * p.y}; }
  scene::Point to_scene(scene::Point q) const { return {(q.x - offset_x) / scale, (offset_y - q.y) / scale}; }
};

// Uniform scale that fits every point inside the canvas with a margin,
// centred on the bounding box.
Viewport fit_viewport(const std::vector<PlotTrack>& tracks, double width = 640.0, double height = 640.0,
                      double margin = 24.0);

// One <polyline> per track, styled by role. The transform is recorded on the
// root element as data-scale / data-offset-x / data-offset-y.
std::string render_svg(const std::vector<PlotTrack>& tracks, const Viewport& viewport,
                       const std::string& title);

}  // namespace csr
