#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "csr/cli.hpp"
#include "csr/error.hpp"
#include "csr/kernels.hpp"
#include "csr/kv_config.hpp"
#include "csr/scene/scene.hpp"
#include "csr/scene/splits.hpp"
#include "csr/scene/synth.hpp"
#include "csr/scene/windows.hpp"
#include "csr/svg_plot.hpp"
#include "csr/train/checkpoint.hpp"
#include "csr/train/efficiency.hpp"
#include "csr/train/evaluate.hpp"
#include "csr/train/trainer.hpp"

namespace csr {
namespace {

namespace fs = std::filesystem;

// Help text per key; "command.key" entries override the shared ones.
std::string help_for(const std::string& command, const std::string& key) {
  static const std::map<std::string, std::string> text = {
      {"seed", "run seed (model init, shuffling, noise)"},
      {"out", "output directory"},
      {"scenes", "number of scenes"},
      {"walkers", "straight constant-velocity pedestrians per scene"},
      {"turners", "pedestrians that walk straight and then turn"},
      {"crossing-pairs", "pairs whose paths cross"},
      {"avoidance-pairs", "head-on pairs that swerve around each other"},
      {"noise-sigma", "Gaussian position noise"},
      {"speed-min", "slowest walking speed per sample"},
      {"speed-max", "fastest walking speed per sample"},
      {"mask-radius", "social mask distance threshold"},
      {"track-length", "samples per track"},
      {"frame-step", "frame id increment between samples"},
      {"cell-spacing", "distance between independent groups"},
      {"head", "baseline | cascaded | slide"},
      {"refiner", "social refinement on | off"},
      {"tau", "observed samples"},
      {"delta", "predicted samples"},
      {"alpha", "slide window length (<= tau)"},
      {"widths", "width preset: published | desk | narrow<N>"},
      {"width-feature", "feature width F"},
      {"width-latent", "latent width"},
      {"width-e-upast", "hidden widths of the past encoder, comma separated"},
      {"width-e-point", "hidden widths of the point encoder"},
      {"width-e-latent", "hidden widths of the latent encoder"},
      {"width-d-latent", "hidden widths of the point decoder"},
      {"width-e-opast", "hidden widths of the refiner's past encoder"},
      {"width-e-pfuture", "hidden widths of the refiner's prediction encoder"},
      {"width-d-offsets", "hidden widths of the offset decoder"},
      {"teacher-forcing", "feed ground truth instead of predictions while training: on | off"},
      {"preset", "published | desk (training budget and widths)"},
      {"epochs", "training epochs"},
      {"lr", "Adam learning rate"},
      {"data", "scene file or directory of scene files"},
      {"format", "tsv-frame-ped-xy | csv-sdd"},
      {"stride", "window stride in samples"},
      {"holdout", "comma separated scene ids held out of training"},
      {"checkpoint", "checkpoint directory"},
      {"k", "samples per pedestrian for best-of-K"},
      {"window", "first window index to plot"},
      {"count", "number of windows to plot"},
      {"timed", "timed batches (>= 20)"},
      {"train.batch", "windows per optimisation step"},
      {"eval.batch", "windows per forward pass (does not change results)"},
      {"report.batch", "windows per timed batch"},
      {"eval.seed", "sampling seed"},
      {"plot.seed", "sampling seed"},
      {"eval.tau", "must match the checkpoint when given"},
      {"eval.delta", "must match the checkpoint when given"},
      {"eval.alpha", "must match the checkpoint when given"},
      {"eval.head", "must match the checkpoint when given"},
      {"plot.tau", "observed samples; must match the checkpoint when one is given"},
      {"plot.delta", "predicted samples; must match the checkpoint when one is given"},
      {"plot.alpha", "must match the checkpoint when given"},
      {"plot.head", "must match the checkpoint when given"},
  };
  if (auto it = text.find(command + "." + key); it != text.end()) return it->second;
  if (auto it = text.find(key); it != text.end()) return it->second;
  return key;
}

// A subcommand whose options are all plain `key` strings. Values come from
// --config first and are then overridden by flags given on the command line.
struct Keyed {
  CLI::App* app = nullptr;
  std::map<std::string, std::string> raw;
  std::vector<std::string> names;
  std::string config_path;

  void key(const std::string& name) {
    names.push_back(name);
    app->add_option("--" + name, raw[name], help_for(app->get_name(), name));
  }

  KeyValues resolve() const {
    KeyValues kv = config_path.empty() ? KeyValues{} : read_key_values(config_path);
    for (const auto& n : names) {
      if (app->count("--" + n) > 0) kv[n] = raw.at(n);
    }
    return kv;
  }
};

Keyed make_command(CLI::App& root, const std::string& name, const std::string& help) {
  Keyed k;
  k.app = root.add_subcommand(name, help);
  return k;
}

std::size_t positive(KeyReader& r, const std::string& key, std::size_t fallback) {
  const std::int64_t v = r.integer(key, static_cast<std::int64_t>(fallback));
  if (v <= 0) throw UsageError(key + " must be >= 1");
  return static_cast<std::size_t>(v);
}

std::uint64_t seed_of(KeyReader& r, std::uint64_t fallback = 0) {
  const std::int64_t v = r.integer("seed", static_cast<std::int64_t>(fallback));
  if (v < 0) throw UsageError("seed must be >= 0");
  return static_cast<std::uint64_t>(v);
}

std::set<std::string> split_list(const std::string& text) {
  std::set<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(item);
  }
  return out;
}

std::string join_list(const std::set<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : ",") + i;
  return s;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw DataError("cannot create output directory " + dir.string());
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path.string());
  return f;
}

std::vector<scene::TrajectoryScene> load_scenes(const std::string& data, scene::Format format) {
  if (data.empty()) throw UsageError("--data is required");
  const fs::path p(data);
  if (!fs::exists(p)) throw DataError("dataset not found: " + data);
  std::vector<fs::path> files;
  if (fs::is_directory(p)) {
    for (const auto& e : fs::directory_iterator(p)) {
      const std::string ext = e.path().extension().string();
      if (e.path().filename() == "run_config.txt") continue;
      if (e.is_regular_file() && (ext == ".tsv" || ext == ".txt" || ext == ".csv")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(p);
  }
  if (files.empty()) throw DataError("no scene files in " + data);
  std::vector<scene::TrajectoryScene> scenes;
  for (const auto& f : files) scenes.push_back(scene::parse_scene(f, format));
  return scenes;
}

// Scenes used for training (everything but the holdout) or testing (the
// holdout, or every scene when none is held out).
std::vector<scene::SceneWindow> select_windows(const std::vector<scene::TrajectoryScene>& scenes,
                                               const std::set<std::string>& holdout, bool training,
                                               const model::Horizon& h, std::size_t stride) {
  std::set<std::string> keep;
  if (holdout.empty()) {
    for (const auto& s : scenes) keep.insert(s.scene_id);
  } else {
    std::vector<std::string> ids;
    for (const auto& s : scenes) ids.push_back(s.scene_id);
    const auto plan = scene::make_splits(ids, scene::SplitMode::kFixed, holdout).front();
    keep = training ? plan.train_scenes : plan.test_scenes;
  }
  std::vector<scene::SceneWindow> out;
  for (const auto& s : scenes) {
    if (!keep.contains(s.scene_id)) continue;
    auto w = scene::extract_windows(s, h.tau, h.delta, stride);
    out.insert(out.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  if (out.empty()) throw DataError("no complete windows of " + std::to_string(h.tau + h.delta) + " samples in the selected scenes");
  return out;
}

// ---------------------------------------------------------------- synth

int cmd_synth(const Keyed& k, std::ostream& out) {
  KeyValues kv = k.resolve();
  KeyReader r(kv);
  const std::uint64_t seed = seed_of(r);
  const std::string dir = r.text("out", "");
  if (dir.empty()) throw UsageError("--out is required");
  KeyValues synth_keys;
  for (const auto& [key, value] : kv) {
    if (key != "seed" && key != "out") synth_keys[key] = value;
  }
  const scene::SynthConfig cfg = scene::synth_config_from(synth_keys);
  const auto scenes = scene::synth_scenes(cfg, seed);
  ensure_dir(dir);
  for (const auto& s : scenes) {
    scene::write_scene(s, fs::path(dir) / (s.scene_id + ".tsv"), scene::Format::kTsvFramePedXy);
  }
  KeyValues resolved = scene::synth_config_to_kv(cfg);
  resolved["seed"] = std::to_string(seed);
  resolved["out"] = dir;
  write_key_values(fs::path(dir) / "run_config.txt", resolved);
  out << "wrote " << scenes.size() << " scene(s) to " << dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

int cmd_train(const Keyed& k, bool dry_run, bool quiet, std::ostream& out) {
  KeyReader r(k.resolve());
  const std::string preset = r.text("preset", "published");
  if (preset != "published" && preset != "desk") throw UsageError("--preset must be published or desk");
  train::TrainConfig tc = preset == "desk" ? train::TrainConfig::desk() : train::TrainConfig{};
  model::ModelConfig defaults;
  if (preset == "desk") defaults.widths = model::NetworkWidths::desk();
  const model::ModelConfig mc = train::model_config_from(r, defaults);
  tc.epochs = positive(r, "epochs", tc.epochs);
  tc.batch_windows = positive(r, "batch", tc.batch_windows);
  tc.lr = r.real("lr", tc.lr);
  tc.seed = mc.seed;
  tc.validate();
  const std::string data = r.text("data", "");
  const scene::Format format = scene::parse_format(r.text("format", "tsv-frame-ped-xy"));
  const std::size_t stride = positive(r, "stride", 1);
  const std::set<std::string> holdout = split_list(r.text("holdout", ""));
  const std::string dir = r.text("out", "");
  r.reject_unknown();

  KeyValues resolved = train::model_config_to_kv(mc);
  resolved["preset"] = preset;
  resolved["epochs"] = std::to_string(tc.epochs);
  resolved["batch"] = std::to_string(tc.batch_windows);
  resolved["lr"] = format_real(tc.lr);
  resolved["data"] = data;
  resolved["format"] = std::string(scene::format_name(format));
  resolved["stride"] = std::to_string(stride);
  resolved["holdout"] = join_list(holdout);
  resolved["out"] = dir;

  if (dry_run) {
    out << format_key_values(resolved);
    return kExitOk;
  }
  if (dir.empty()) throw UsageError("--out is required");

  const auto scenes = load_scenes(data, format);
  const auto windows = select_windows(scenes, holdout, true, mc.horizon, stride);
  ensure_dir(dir);
  write_key_values(fs::path(dir) / "run_config.txt", resolved);

  model::Model m(mc);
  std::ofstream csv = open_out(fs::path(dir) / "loss.csv");
  csv << "epoch,l_ap,l_kld,l_r,total\n";
  const auto log = [&](const train::EpochReport& e) {
    csv << e.epoch << ',' << format_real(e.loss.l_ap) << ',' << format_real(e.loss.l_kld) << ','
        << format_real(e.loss.l_r) << ',' << format_real(e.loss.total) << '\n';
    if (!quiet && (e.epoch == 1 || e.epoch % 10 == 0 || e.epoch == tc.epochs)) {
      out << "epoch " << e.epoch << " total " << e.loss.total << "\n";
    }
  };
  train::train(m, windows, tc, log);
  train::save_checkpoint(m, fs::path(dir) / "checkpoint");
  out << "trained " << model::head_kind_name(mc.head) << (mc.refiner ? "+refiner" : "") << " on "
      << windows.size() << " windows, " << m.parameter_count() << " parameters, checkpoint at "
      << (fs::path(dir) / "checkpoint").string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

// Explicit horizon flags must agree with the checkpoint.
void check_horizon(KeyReader& r, const model::ModelConfig& mc) {
  const std::pair<const char*, std::size_t> fields[] = {
      {"tau", mc.horizon.tau}, {"delta", mc.horizon.delta}, {"alpha", mc.horizon.alpha}};
  for (const auto& [key, value] : fields) {
    if (!r.has(key)) continue;
    const std::size_t given = positive(r, key, value);
    if (given != value) {
      throw UsageError(std::string("checkpoint/config mismatch: ") + key + " is " + std::to_string(value) +
                       " in the checkpoint but " + std::to_string(given) + " was requested");
    }
  }
  if (r.has("head")) {
    const std::string head = r.text("head", "");
    if (model::parse_head_kind(head) != mc.head) {
      throw UsageError("checkpoint/config mismatch: checkpoint head is " +
                       std::string(model::head_kind_name(mc.head)));
    }
  }
}

int cmd_eval(const Keyed& k, std::ostream& out) {
  KeyReader r(k.resolve());
  const std::string ckpt = r.text("checkpoint", "");
  if (ckpt.empty()) throw UsageError("--checkpoint is required");
  model::Model m = train::load_checkpoint(ckpt);
  check_horizon(r, m.config());
  train::EvalOptions opt;
  opt.k = positive(r, "k", 20);
  opt.seed = seed_of(r);
  opt.batch_windows = positive(r, "batch", opt.batch_windows);
  const std::string data = r.text("data", "");
  const scene::Format format = scene::parse_format(r.text("format", "tsv-frame-ped-xy"));
  const std::size_t stride = positive(r, "stride", 1);
  const std::set<std::string> holdout = split_list(r.text("holdout", ""));
  const std::string dir = r.text("out", "");
  r.reject_unknown();
  if (dir.empty()) throw UsageError("--out is required");

  const auto scenes = load_scenes(data, format);
  const auto windows = select_windows(scenes, holdout, false, m.config().horizon, stride);
  const train::EvalReport rep = train::evaluate(m, windows, opt);

  ensure_dir(dir);
  KeyValues resolved;
  resolved["checkpoint"] = ckpt;
  resolved["k"] = std::to_string(opt.k);
  resolved["seed"] = std::to_string(opt.seed);
  resolved["batch"] = std::to_string(opt.batch_windows);
  resolved["data"] = data;
  resolved["format"] = std::string(scene::format_name(format));
  resolved["stride"] = std::to_string(stride);
  resolved["holdout"] = join_list(holdout);
  resolved["out"] = dir;
  write_key_values(fs::path(dir) / "run_config.txt", resolved);

  std::ofstream csv = open_out(fs::path(dir) / "eval.csv");
  csv << "k,ade,fde,scene\n";
  csv << rep.k << ',' << format_real(rep.ade) << ',' << format_real(rep.fde) << ",all\n";
  for (const auto& s : rep.per_scene) {
    csv << rep.k << ',' << format_real(s.ade) << ',' << format_real(s.fde) << ',' << s.scene << '\n';
  }
  std::ofstream curve = open_out(fs::path(dir) / "per_frame.csv");
  curve << "frame,ade\n";
  for (std::size_t t = 0; t < rep.per_frame.size(); ++t) curve << (t + 1) << ',' << format_real(rep.per_frame[t]) << '\n';

  out << "best-of-" << rep.k << " over " << rep.pedestrians << " pedestrians: ADE " << rep.ade << " FDE "
      << rep.fde << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- plot

int cmd_plot(const Keyed& k, std::ostream& out) {
  KeyReader r(k.resolve());
  const std::string ckpt = r.text("checkpoint", "");
  std::optional<model::Model> m;
  model::Horizon h;
  if (!ckpt.empty()) {
    m.emplace(train::load_checkpoint(ckpt));
    check_horizon(r, m->config());
    h = m->config().horizon;
  } else {
    h.tau = positive(r, "tau", h.tau);
    h.delta = positive(r, "delta", h.delta);
  }
  const std::uint64_t seed = seed_of(r);
  const std::size_t first = static_cast<std::size_t>(std::max<std::int64_t>(0, r.integer("window", 0)));
  const std::size_t count = positive(r, "count", 1);
  const std::string data = r.text("data", "");
  const scene::Format format = scene::parse_format(r.text("format", "tsv-frame-ped-xy"));
  const std::size_t stride = positive(r, "stride", 1);
  const std::set<std::string> holdout = split_list(r.text("holdout", ""));
  const std::string dir = r.text("out", "");
  r.reject_unknown();
  if (dir.empty()) throw UsageError("--out is required");

  const auto scenes = load_scenes(data, format);
  const auto windows = select_windows(scenes, holdout, false, h, stride);
  if (first >= windows.size()) {
    throw UsageError("nothing to plot: window " + std::to_string(first) + " of " + std::to_string(windows.size()));
  }
  ensure_dir(dir);
  const std::size_t last = std::min(windows.size(), first + count);
  for (std::size_t wi = first; wi < last; ++wi) {
    const auto& w = windows[wi];
    std::vector<PlotTrack> tracks;
    std::optional<train::WindowPrediction> pred;
    if (m) {
      pred = train::predict_window(*m, w, train::sample_noise(seed, wi, 0, w.size(), h.delta, m->config().widths.latent_dim));
    }
    for (std::size_t i = 0; i < w.size(); ++i) {
      const scene::Point a = w.anchor[i];
      PlotTrack past{i, TrackRole::kPast, {}}, truth{i, TrackRole::kTruth, {}};
      for (std::size_t t = 0; t < h.tau; ++t) past.points.push_back(w.absolute_past[i * h.tau + t]);
      for (std::size_t t = 0; t < h.delta; ++t) truth.points.push_back({a.x + w.future_at(i, t).x, a.y + w.future_at(i, t).y});
      tracks.push_back(std::move(past));
      tracks.push_back(std::move(truth));
      if (pred) {
        PlotTrack raw{i, TrackRole::kRaw, {}}, refined{i, TrackRole::kRefined, {}};
        for (std::size_t t = 0; t < h.delta; ++t) {
          raw.points.push_back({a.x + pred->raw.at(i, 2 * t), a.y + pred->raw.at(i, 2 * t + 1)});
          refined.points.push_back({a.x + pred->refined.at(i, 2 * t), a.y + pred->refined.at(i, 2 * t + 1)});
        }
        tracks.push_back(std::move(raw));
        tracks.push_back(std::move(refined));
      }
    }
    const Viewport vp = fit_viewport(tracks);
    const std::string stem = "window_" + std::to_string(wi);
    open_out(fs::path(dir) / (stem + ".svg"))
        << render_svg(tracks, vp, w.scene_id + " frame " + std::to_string(w.start_frame));
    std::ofstream csv = open_out(fs::path(dir) / (stem + ".csv"));
    csv << "ped,role,step,x,y\n";
    for (const auto& t : tracks) {
      for (std::size_t s = 0; s < t.points.size(); ++s) {
        csv << t.ped << ',' << track_role_name(t.role) << ',' << s << ',' << format_real(t.points[s].x) << ','
            << format_real(t.points[s].y) << '\n';
      }
    }
  }
  KeyValues resolved;
  resolved["checkpoint"] = ckpt;
  resolved["tau"] = std::to_string(h.tau);
  resolved["delta"] = std::to_string(h.delta);
  resolved["seed"] = std::to_string(seed);
  resolved["window"] = std::to_string(first);
  resolved["count"] = std::to_string(count);
  resolved["data"] = data;
  resolved["format"] = std::string(scene::format_name(format));
  resolved["stride"] = std::to_string(stride);
  resolved["holdout"] = join_list(holdout);
  resolved["out"] = dir;
  write_key_values(fs::path(dir) / "run_config.txt", resolved);
  out << "plotted " << (last - first) << " window(s) to " << dir << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- report

int cmd_report(const Keyed& k, const std::vector<std::string>& checkpoints, std::ostream& out) {
  KeyValues kv = k.resolve();
  std::vector<std::string> ckpts = checkpoints;
  if (ckpts.empty() && kv.contains("checkpoint")) {
    for (const auto& c : split_list(kv["checkpoint"])) ckpts.push_back(c);
  }
  kv.erase("checkpoint");
  KeyReader r(kv);
  train::EfficiencyOptions opt;
  opt.batch_windows = positive(r, "batch", opt.batch_windows);
  opt.timed_batches = positive(r, "timed", opt.timed_batches);
  const std::string data = r.text("data", "");
  const scene::Format format = scene::parse_format(r.text("format", "tsv-frame-ped-xy"));
  const std::string dir = r.text("out", "");
  r.reject_unknown();
  if (ckpts.empty()) throw UsageError("report needs at least one --checkpoint");
  if (opt.timed_batches < 20) throw UsageError("--timed must be >= 20");

  struct Row {
    std::string name;
    model::ModelConfig config;
    train::EfficiencyReport rep;
  };
  std::vector<Row> rows;
  for (const auto& c : ckpts) {
    model::Model m = train::load_checkpoint(c);
    const auto& h = m.config().horizon;
    std::vector<scene::SceneWindow> windows;
    if (!data.empty()) {
      windows = select_windows(load_scenes(data, format), {}, false, h, 1);
    } else {
      scene::SynthConfig sc;
      sc.walkers = 8;
      sc.track_length = h.tau + h.delta;
      for (const auto& s : scene::synth_scenes(sc, 0)) {
        auto w = scene::extract_windows(s, h.tau, h.delta);
        windows.insert(windows.end(), w.begin(), w.end());
      }
    }
    rows.push_back({c, m.config(), train::efficiency_report(m, windows, opt)});
  }

  std::optional<std::size_t> cascaded;
  for (const auto& row : rows) {
    if (row.config.head == model::HeadKind::kCascaded) cascaded = row.rep.parameters;
  }
  const auto reduction = [&](const Row& row) -> std::string {
    if (!cascaded) return "";
    return format_real(100.0 * (1.0 - static_cast<double>(row.rep.parameters) / static_cast<double>(*cascaded)));
  };

  out << "| checkpoint | head | refiner | parameters | seconds/batch | reduction vs cascaded (%) |\n";
  out << "|---|---|---|---|---|---|\n";
  for (const auto& row : rows) {
    out << "| " << row.name << " | " << model::head_kind_name(row.config.head) << " | "
        << (row.config.refiner ? "on" : "off") << " | " << row.rep.parameters << " | " << row.rep.seconds_per_batch
        << " | " << reduction(row) << " |\n";
  }
  out << "kernels: " << kernels::isa_name(kernels::active().isa) << ", batch of " << opt.batch_windows
      << " windows, " << opt.timed_batches << " timed batches\n";

  if (!dir.empty()) {
    ensure_dir(dir);
    std::ofstream csv = open_out(fs::path(dir) / "report.csv");
    csv << "checkpoint,head,refiner,parameters,seconds_per_batch,reduction_vs_cascaded\n";
    for (const auto& row : rows) {
      csv << row.name << ',' << model::head_kind_name(row.config.head) << ',' << (row.config.refiner ? "on" : "off")
          << ',' << row.rep.parameters << ',' << format_real(row.rep.seconds_per_batch) << ',' << reduction(row)
          << '\n';
    }
    KeyValues resolved;
    std::string joined;
    for (const auto& c : ckpts) joined += (joined.empty() ? "" : ",") + c;
    resolved["checkpoint"] = joined;
    resolved["batch"] = std::to_string(opt.batch_windows);
    resolved["timed"] = std::to_string(opt.timed_batches);
    resolved["data"] = data;
    resolved["format"] = std::string(scene::format_name(format));
    resolved["out"] = dir;
    write_key_values(fs::path(dir) / "run_config.txt", resolved);
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app("Cascaded and slide CVAE pedestrian trajectory prediction with social refinement", "csr");
  app.require_subcommand(1);
  app.set_version_flag("--version", "csr 1.0");

  Keyed synth = make_command(app, "synth", "Generate synthetic scenes");
  synth.app->add_option("--config", synth.config_path, "key=value config file");
  for (const char* key : {"seed", "out", "scenes", "walkers", "turners", "crossing-pairs", "avoidance-pairs",
                          "noise-sigma", "speed-min", "speed-max", "mask-radius", "track-length", "frame-step",
                          "cell-spacing"}) {
    synth.key(key);
  }

  const char* model_keys[] = {"head", "refiner", "tau", "delta", "alpha", "widths", "width-feature", "width-latent",
                              "width-e-upast", "width-e-point", "width-e-latent", "width-d-latent", "width-e-opast",
                              "width-e-pfuture", "width-d-offsets", "mask-radius", "teacher-forcing"};

  Keyed trainc = make_command(app, "train", "Train a model and write a checkpoint");
  trainc.app->add_option("--config", trainc.config_path, "key=value config file");
  for (const char* key : model_keys) trainc.key(key);
  for (const char* key : {"preset", "epochs", "batch", "lr", "seed", "data", "format", "stride", "holdout", "out"}) {
    trainc.key(key);
  }
  bool dry_run = false, quiet = false;
  trainc.app->add_flag("--dry-run", dry_run, "Print the resolved configuration and exit");
  trainc.app->add_flag("--quiet", quiet, "No per-epoch progress");

  Keyed evalc = make_command(app, "eval", "Best-of-K evaluation of a checkpoint");
  evalc.app->add_option("--config", evalc.config_path, "key=value config file");
  for (const char* key : {"checkpoint", "k", "seed", "batch", "data", "format", "stride", "holdout", "out", "tau",
                          "delta", "alpha", "head"}) {
    evalc.key(key);
  }

  Keyed plot = make_command(app, "plot", "SVG overlays of past, truth, raw and refined trajectories");
  plot.app->add_option("--config", plot.config_path, "key=value config file");
  for (const char* key : {"checkpoint", "seed", "window", "count", "data", "format", "stride", "holdout", "out",
                          "tau", "delta", "alpha", "head"}) {
    plot.key(key);
  }

  Keyed report = make_command(app, "report", "Parameter counts and inference time per checkpoint");
  report.app->add_option("--config", report.config_path, "key=value config file");
  std::vector<std::string> report_ckpts;
  report.app->add_option("--checkpoint", report_ckpts, "checkpoint directory (repeatable)");
  for (const char* key : {"batch", "timed", "data", "format", "out"}) {
    report.key(key);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (synth.app->parsed()) return cmd_synth(synth, out);
    if (trainc.app->parsed()) return cmd_train(trainc, dry_run, quiet, out);
    if (evalc.app->parsed()) return cmd_eval(evalc, out);
    if (plot.app->parsed()) return cmd_plot(plot, out);
    if (report.app->parsed()) return cmd_report(report, report_ckpts, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const NumericError& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace csr
