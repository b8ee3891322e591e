#include "csr/scene/windows.hpp"

#include <algorithm>
#include <map>

#include "csr/error.hpp"

namespace csr::scene {

SceneWindow SceneWindow::select(const std::vector<std::size_t>& order) const {
  SceneWindow w;
  w.scene_id = scene_id;
  w.start_frame = start_frame;
  w.tau = tau;
  w.delta = delta;
  for (std::size_t i : order) {
    if (i >= size()) throw UsageError("SceneWindow::select: index out of range");
    w.peds.push_back(peds[i]);
    w.anchor.push_back(anchor[i]);
    w.past.insert(w.past.end(), past.begin() + i * tau, past.begin() + (i + 1) * tau);
    w.absolute_past.insert(w.absolute_past.end(), absolute_past.begin() + i * tau,
                           absolute_past.begin() + (i + 1) * tau);
    w.future.insert(w.future.end(), future.begin() + i * delta, future.begin() + (i + 1) * delta);
  }
  return w;
}

SceneWindow make_window(std::string scene_id, std::int64_t start_frame, std::size_t tau,
                        std::size_t delta, std::vector<std::int64_t> peds,
                        const std::vector<std::vector<Point>>& tracks) {
  if (tau == 0 || delta == 0) throw UsageError("tau and delta must be positive");
  if (tracks.size() != peds.size()) throw UsageError("make_window: one track per pedestrian");
  SceneWindow w;
  w.scene_id = std::move(scene_id);
  w.start_frame = start_frame;
  w.tau = tau;
  w.delta = delta;
  w.peds = std::move(peds);
  for (const auto& track : tracks) {
    if (track.size() != tau + delta) throw UsageError("make_window: track length must be tau + delta");
    const Point a = track[tau - 1];
    w.anchor.push_back(a);
    for (std::size_t t = 0; t < tau; ++t) {
      w.absolute_past.push_back(track[t]);
      w.past.push_back({track[t].x - a.x, track[t].y - a.y});
    }
    for (std::size_t t = tau; t < tau + delta; ++t) {
      w.future.push_back({track[t].x - a.x, track[t].y - a.y});
    }
  }
  return w;
}

std::vector<SceneWindow> extract_windows(const TrajectoryScene& scene, std::size_t tau,
                                         std::size_t delta, std::size_t stride) {
  if (tau == 0 || delta == 0 || stride == 0) {
    throw UsageError("extract_windows: tau, delta and stride must be >= 1");
  }
  std::vector<SceneWindow> windows;
  if (scene.records.empty()) return windows;

  // ped -> frame -> point
  std::map<std::int64_t, std::map<std::int64_t, Point>> tracks;
  std::int64_t min_frame = scene.records.front().frame;
  std::int64_t max_frame = min_frame;
  for (const Record& r : scene.records) {
    tracks[r.ped][r.frame] = Point{r.x, r.y};
    min_frame = std::min(min_frame, r.frame);
    max_frame = std::max(max_frame, r.frame);
  }
  const std::int64_t step = scene.frame_step;
  const std::int64_t span = static_cast<std::int64_t>(tau + delta);
  const std::int64_t advance = static_cast<std::int64_t>(stride) * step;

  for (std::int64_t start = min_frame; start + (span - 1) * step <= max_frame; start += advance) {
    std::vector<std::int64_t> peds;
    std::vector<std::vector<Point>> pts;
    for (const auto& [ped, frames] : tracks) {
      std::vector<Point> track;
      track.reserve(tau + delta);
      for (std::int64_t s = 0; s < span; ++s) {
        auto it = frames.find(start + s * step);
        if (it == frames.end()) break;
        track.push_back(it->second);
      }
      if (track.size() == tau + delta) {
        peds.push_back(ped);
        pts.push_back(std::move(track));
      }
    }
    if (!peds.empty()) {
      windows.push_back(make_window(scene.scene_id, start, tau, delta, std::move(peds), pts));
    }
  }
  return windows;
}

}  // namespace csr::scene
