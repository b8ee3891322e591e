#include "csr/scene/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>

#include "csr/error.hpp"
#include "csr/scene/windows.hpp"

namespace csr::scene {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using Track = std::vector<Point>;

struct Generator {
  const SynthConfig& cfg;
  std::mt19937_64& rng;

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
  double speed() { return cfg.speed_min == cfg.speed_max ? cfg.speed_min : uniform(cfg.speed_min, cfg.speed_max); }
  std::size_t length() const { return cfg.track_length; }

  // Sample index at which paired archetypes meet.
  int meet_time() {
    const int base = static_cast<int>(std::floor(0.4 * static_cast<double>(length())));
    const int lo = std::max(0, base - 1);
    const int hi = std::min(static_cast<int>(length()) - 1, base + 2);
    return uniform_int(lo, hi);
  }

  Track walker(Point cell) {
    const Point p0{cell.x + uniform(-2.0, 2.0), cell.y + uniform(-2.0, 2.0)};
    const double heading = uniform(0.0, kTwoPi);
    const double s = speed();
    const Point v{s * std::cos(heading), s * std::sin(heading)};
    Track t(length());
    for (std::size_t i = 0; i < length(); ++i) {
      const double k = static_cast<double>(i);
      t[i] = {p0.x + k * v.x, p0.y + k * v.y};
    }
    return t;
  }

  Track turner(Point cell) {
    Point p{cell.x + uniform(-2.0, 2.0), cell.y + uniform(-2.0, 2.0)};
    double heading = uniform(0.0, kTwoPi);
    const double s = speed();
    const double rate = uniform(0.08, 0.2) * (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    const int turn_start = meet_time();
    Track t(length());
    for (std::size_t i = 0; i < length(); ++i) {
      t[i] = p;
      if (static_cast<int>(i) >= turn_start) heading += rate;
      p = {p.x + s * std::cos(heading), p.y + s * std::sin(heading)};
    }
    return t;
  }

  std::pair<Track, Track> crossing(Point cell) {
    const int tc = meet_time();
    const double h1 = uniform(0.0, kTwoPi);
    const double h2 = h1 + (uniform(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * uniform(std::numbers::pi / 3.0, 2.0 * std::numbers::pi / 3.0);
    const double s1 = speed(), s2 = speed();
    const double gap = 0.25 * cfg.mask_radius;
    const double gap_dir = uniform(0.0, kTwoPi);
    const Point off{gap * std::cos(gap_dir), gap * std::sin(gap_dir)};
    Track a(length()), b(length());
    for (std::size_t i = 0; i < length(); ++i) {
      const double dt = static_cast<double>(static_cast<int>(i) - tc);
      a[i] = {cell.x + dt * s1 * std::cos(h1), cell.y + dt * s1 * std::sin(h1)};
      b[i] = {cell.x + off.x + dt * s2 * std::cos(h2), cell.y + off.y + dt * s2 * std::sin(h2)};
    }
    return {a, b};
  }

  std::pair<Track, Track> avoidance(Point cell) {
    const int tc = meet_time();
    const double h = uniform(0.0, kTwoPi);
    const Point u{std::cos(h), std::sin(h)};
    const Point n{-u.y, u.x};
    const double s = speed();
    const double offset = 0.2 * cfg.mask_radius;
    const double swerve = 0.25 * cfg.mask_radius;
    const double width = 3.0;
    Track a(length()), b(length());
    for (std::size_t i = 0; i < length(); ++i) {
      const double dt = static_cast<double>(static_cast<int>(i) - tc);
      const double e = swerve * std::exp(-(dt / width) * (dt / width));
      const double lat_a = -0.5 * offset - e;
      const double lat_b = 0.5 * offset + e;
      a[i] = {cell.x + dt * s * u.x + lat_a * n.x, cell.y + dt * s * u.y + lat_a * n.y};
      b[i] = {cell.x - dt * s * u.x + lat_b * n.x, cell.y - dt * s * u.y + lat_b * n.y};
    }
    return {a, b};
  }

  void add_noise(Track& t) {
    if (cfg.noise_sigma <= 0.0) return;
    std::normal_distribution<double> dist(0.0, cfg.noise_sigma);
    for (Point& p : t) {
      p.x += dist(rng);
      p.y += dist(rng);
    }
  }
};

}  // namespace

void SynthConfig::validate() const {
  if (scenes == 0) throw UsageError("synth: scenes must be >= 1");
  if (instances_per_scene() == 0) throw UsageError("synth: configuration has zero archetypes");
  if (!(speed_min > 0.0) || !(speed_max >= speed_min)) throw UsageError("synth: need 0 < speed-min <= speed-max");
  if (noise_sigma < 0.0) throw UsageError("synth: noise-sigma must be >= 0");
  if (!(mask_radius > 0.0)) throw UsageError("synth: mask-radius must be > 0");
  if (track_length < 2) throw UsageError("synth: track-length must be >= 2");
  if (frame_step <= 0) throw UsageError("synth: frame-step must be > 0");
  if (!(cell_spacing > 0.0)) throw UsageError("synth: cell-spacing must be > 0");
}

SynthConfig synth_config_from(KeyValues kv) {
  KeyReader r(std::move(kv));
  SynthConfig c;
  const auto count = [&](const char* key, std::size_t fallback) {
    const std::int64_t v = r.integer(key, static_cast<std::int64_t>(fallback));
    if (v < 0) throw UsageError(std::string("synth: ") + key + " must be >= 0");
    return static_cast<std::size_t>(v);
  };
  c.scenes = count("scenes", c.scenes);
  c.walkers = count("walkers", c.walkers);
  c.turners = count("turners", c.turners);
  c.crossing_pairs = count("crossing-pairs", c.crossing_pairs);
  c.avoidance_pairs = count("avoidance-pairs", c.avoidance_pairs);
  c.noise_sigma = r.real("noise-sigma", c.noise_sigma);
  c.speed_min = r.real("speed-min", c.speed_min);
  c.speed_max = r.real("speed-max", c.speed_max);
  c.mask_radius = r.real("mask-radius", c.mask_radius);
  c.track_length = count("track-length", c.track_length);
  c.frame_step = r.integer("frame-step", c.frame_step);
  c.cell_spacing = r.real("cell-spacing", c.cell_spacing);
  r.reject_unknown();
  c.validate();
  return c;
}

KeyValues synth_config_to_kv(const SynthConfig& c) {
  return {
      {"scenes", std::to_string(c.scenes)},
      {"walkers", std::to_string(c.walkers)},
      {"turners", std::to_string(c.turners)},
      {"crossing-pairs", std::to_string(c.crossing_pairs)},
      {"avoidance-pairs", std::to_string(c.avoidance_pairs)},
      {"noise-sigma", format_real(c.noise_sigma)},
      {"speed-min", format_real(c.speed_min)},
      {"speed-max", format_real(c.speed_max)},
      {"mask-radius", format_real(c.mask_radius)},
      {"track-length", std::to_string(c.track_length)},
      {"frame-step", std::to_string(c.frame_step)},
      {"cell-spacing", format_real(c.cell_spacing)},
  };
}

std::vector<TrajectoryScene> synth_scenes(const SynthConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  Generator gen{config, rng};
  std::vector<TrajectoryScene> scenes;
  for (std::size_t s = 0; s < config.scenes; ++s) {
    std::vector<Track> tracks;
    std::size_t cell_index = 0;
    const auto next_cell = [&] {
      return Point{config.cell_spacing * static_cast<double>(cell_index++), 0.0};
    };
    for (std::size_t i = 0; i < config.walkers; ++i) tracks.push_back(gen.walker(next_cell()));
    for (std::size_t i = 0; i < config.turners; ++i) tracks.push_back(gen.turner(next_cell()));
    for (std::size_t i = 0; i < config.crossing_pairs; ++i) {
      auto [a, b] = gen.crossing(next_cell());
      tracks.push_back(std::move(a));
      tracks.push_back(std::move(b));
    }
    for (std::size_t i = 0; i < config.avoidance_pairs; ++i) {
      auto [a, b] = gen.avoidance(next_cell());
      tracks.push_back(std::move(a));
      tracks.push_back(std::move(b));
    }
    for (Track& t : tracks) gen.add_noise(t);

    char name[32];
    std::snprintf(name, sizeof(name), "synth_%03zu", s);
    TrajectoryScene scene;
    scene.scene_id = name;
    scene.frame_step = config.frame_step;
    for (std::size_t p = 0; p < tracks.size(); ++p) {
      for (std::size_t i = 0; i < tracks[p].size(); ++i) {
        scene.records.push_back(Record{static_cast<std::int64_t>(i) * config.frame_step,
                                       static_cast<std::int64_t>(p + 1), tracks[p][i].x,
                                       tracks[p][i].y});
      }
    }
    normalize_records(scene.records);
    scenes.push_back(std::move(scene));
  }
  return scenes;
}

}  // namespace csr::scene
