#include "csr/train/checkpoint.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "csr/error.hpp"

namespace csr::train {
namespace {

namespace fs = std::filesystem;
using model::ModelConfig;
using model::NetworkWidths;

constexpr const char* kFormat = "csr-checkpoint-1";

std::string join_widths(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

std::size_t parse_size(std::string_view text, const std::string& what) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw DataError("bad " + what + " '" + std::string(text) + "'");
  }
  return v;
}

std::vector<std::size_t> split_sizes(const std::string& text, char sep, const std::string& what) {
  std::vector<std::size_t> out;
  if (text.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = text.find(sep, pos);
    out.push_back(parse_size(std::string_view(text).substr(pos, next - pos), what));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

struct WidthField {
  const char* key;
  std::vector<std::size_t> NetworkWidths::*member;
};

constexpr WidthField kWidthFields[] = {
    {"width-e-upast", &NetworkWidths::e_upast_hidden},     {"width-e-point", &NetworkWidths::e_point_hidden},
    {"width-e-latent", &NetworkWidths::e_latent_hidden},   {"width-d-latent", &NetworkWidths::d_latent_hidden},
    {"width-e-opast", &NetworkWidths::e_opast_hidden},     {"width-e-pfuture", &NetworkWidths::e_pfuture_hidden},
    {"width-d-offsets", &NetworkWidths::d_offsets_hidden},
};

void write_le_doubles(const fs::path& path, const Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  for (double v : t.values()) {
    std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!out) throw DataError("write failed: " + path.string());
}

void read_le_doubles(const fs::path& path, Tensor& t) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read " + path.string());
  for (double& v : t.values()) {
    unsigned char bytes[8];
    if (!in.read(reinterpret_cast<char*>(bytes), 8)) throw DataError("truncated parameter file " + path.string());
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(bytes[i]) << (8 * i);
    v = std::bit_cast<double>(bits);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw DataError("trailing bytes in " + path.string());
}

}  // namespace

KeyValues model_config_to_kv(const ModelConfig& c) {
  KeyValues kv;
  kv["head"] = std::string(model::head_kind_name(c.head));
  kv["refiner"] = c.refiner ? "on" : "off";
  kv["tau"] = std::to_string(c.horizon.tau);
  kv["delta"] = std::to_string(c.horizon.delta);
  kv["alpha"] = std::to_string(c.horizon.alpha);
  kv["mask-radius"] = format_real(c.mask_radius);
  kv["teacher-forcing"] = c.teacher_forcing ? "on" : "off";
  kv["seed"] = std::to_string(c.seed);
  kv["width-feature"] = std::to_string(c.widths.feature_dim);
  kv["width-latent"] = std::to_string(c.widths.latent_dim);
  for (const auto& f : kWidthFields) kv[f.key] = join_widths(c.widths.*f.member);
  return kv;
}

ModelConfig model_config_from(KeyReader& r, const ModelConfig& d) {
  ModelConfig c = d;
  c.head = model::parse_head_kind(r.text("head", std::string(model::head_kind_name(d.head))));
  c.refiner = r.flag("refiner", d.refiner);
  const auto positive = [&](const char* key, std::size_t fallback) {
    const std::int64_t v = r.integer(key, static_cast<std::int64_t>(fallback));
    if (v <= 0) throw UsageError(std::string(key) + " must be >= 1");
    return static_cast<std::size_t>(v);
  };
  c.horizon.tau = positive("tau", d.horizon.tau);
  c.horizon.delta = positive("delta", d.horizon.delta);
  c.horizon.alpha = positive("alpha", d.horizon.alpha);
  c.mask_radius = r.real("mask-radius", d.mask_radius);
  c.teacher_forcing = r.flag("teacher-forcing", d.teacher_forcing);
  const std::int64_t seed = r.integer("seed", static_cast<std::int64_t>(d.seed));
  if (seed < 0) throw UsageError("seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  if (r.has("widths")) c.widths = NetworkWidths::preset(r.text("widths", "published"));
  c.widths.feature_dim = positive("width-feature", c.widths.feature_dim);
  c.widths.latent_dim = positive("width-latent", c.widths.latent_dim);
  for (const auto& f : kWidthFields) {
    if (r.has(f.key)) c.widths.*f.member = split_sizes(r.text(f.key, ""), ',', f.key);
  }
  c.validate();
  return c;
}

void save_checkpoint(const model::Model& model, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create checkpoint directory " + dir.string() + ": " + ec.message());
  KeyValues kv = model_config_to_kv(model.config());
  kv["format"] = kFormat;
  kv["step"] = std::to_string(model.store().step());
  const auto& params = model.store().params();
  kv["param-count"] = std::to_string(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string file = "p" + std::to_string(i) + ".bin";
    std::string shape;
    for (std::size_t d = 0; d < params[i].value.rank(); ++d) {
      if (d) shape += 'x';
      shape += std::to_string(params[i].value.shape()[d]);
    }
    kv["param." + std::to_string(i)] = params[i].name + " " + shape + " " + file;
    write_le_doubles(dir / file, params[i].value);
  }
  write_key_values(dir / "manifest.txt", kv);
}

ModelConfig read_checkpoint_config(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.txt";
  if (!fs::exists(manifest)) throw DataError("no checkpoint manifest at " + manifest.string());
  KeyReader r(read_key_values(manifest));
  if (r.text("format", "") != kFormat) throw DataError("unsupported checkpoint format in " + manifest.string());
  return model_config_from(r, ModelConfig{});
}

model::Model load_checkpoint(const fs::path& dir) {
  const fs::path manifest = dir / "manifest.txt";
  const KeyValues kv = read_key_values(manifest);
  model::Model m(read_checkpoint_config(dir));
  auto& params = m.store().params();
  const auto count_it = kv.find("param-count");
  if (count_it == kv.end() || parse_size(count_it->second, "param-count") != params.size()) {
    throw DataError("checkpoint parameter count does not match its config");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto it = kv.find("param." + std::to_string(i));
    if (it == kv.end()) throw DataError("checkpoint lacks param." + std::to_string(i));
    std::istringstream fields(it->second);
    std::string name, shape, file, extra;
    if (!(fields >> name >> shape >> file) || (fields >> extra)) {
      throw DataError("malformed manifest entry param." + std::to_string(i));
    }
    if (name != params[i].name) throw DataError("checkpoint parameter " + name + " where " + params[i].name + " expected");
    if (split_sizes(shape, 'x', "shape") != params[i].value.shape()) {
      throw DataError("checkpoint shape " + shape + " for " + name + " disagrees with the config");
    }
    if (file.find('/') != std::string::npos) throw DataError("parameter file must be inside the checkpoint");
    read_le_doubles(dir / file, params[i].value);
  }
  const auto step_it = kv.find("step");
  if (step_it != kv.end()) m.store().set_step(parse_size(step_it->second, "step"));
  return m;
}

}  // namespace csr::train
