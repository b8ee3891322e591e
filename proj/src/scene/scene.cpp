#include "csr/scene/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "csr/error.hpp"

namespace csr::scene {
namespace {

std::string_view trim(std::string_view s) {
  const auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
  while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(std::size_t line, const std::string& what) {
  throw DataError("line " + std::to_string(line) + ": " + what);
}

double parse_real(std::string_view tok, std::size_t line, const char* field) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    fail(line, std::string("non-numeric ") + field + " field '" + std::string(tok) + "'");
  }
  return v;
}

std::int64_t parse_integral(std::string_view tok, std::size_t line, const char* field) {
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec == std::errc() && ptr == tok.data() + tok.size()) return v;
  const double d = parse_real(tok, line, field);
  if (d != std::floor(d) || std::abs(d) > 9.0e15) {
    fail(line, std::string(field) + " field '" + std::string(tok) + "' is not integral");
  }
  return static_cast<std::int64_t>(d);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    const std::size_t start = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t') ++i;
    if (i > start) out.push_back(s.substr(start, i - start));
  }
  return out;
}

std::vector<std::string_view> split_comma(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == ',') {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

void append_number(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

}  // namespace

Format parse_format(std::string_view name) {
  if (name == "tsv-frame-ped-xy" || name == "tsv") return Format::kTsvFramePedXy;
  if (name == "csv-sdd" || name == "csv") return Format::kCsvSdd;
  throw UsageError("unknown scene format '" + std::string(name) + "'");
}

std::string_view format_name(Format f) {
  return f == Format::kTsvFramePedXy ? "tsv-frame-ped-xy" : "csv-sdd";
}

void normalize_records(std::vector<Record>& records) {
  std::stable_sort(records.begin(), records.end(), [](const Record& a, const Record& b) {
    return a.ped != b.ped ? a.ped < b.ped : a.frame < b.frame;
  });
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].ped == records[i - 1].ped && records[i].frame == records[i - 1].frame) {
      throw DataError("duplicate record for frame " + std::to_string(records[i].frame) +
                      ", ped " + std::to_string(records[i].ped));
    }
  }
}

std::int64_t infer_frame_step(const std::vector<Record>& records) {
  std::int64_t g = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].ped == records[i - 1].ped) g = std::gcd(g, records[i].frame - records[i - 1].frame);
  }
  return g > 0 ? g : 1;
}

TrajectoryScene parse_scene_text(std::string_view text, Format format, std::string scene_id,
                                 std::optional<std::int64_t> frame_step) {
  TrajectoryScene scene;
  scene.scene_id = std::move(scene_id);
  std::vector<std::size_t> line_of;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }
    std::vector<std::string_view> fields;
    if (format == Format::kTsvFramePedXy) {
      if (line.front() == '#') continue;
      fields = split_ws(line);
    } else {
      fields = split_comma(line);
      if (!header_seen) {
        if (fields.size() != 4 || fields[0] != "frame" || fields[1] != "ped" || fields[2] != "x" ||
            fields[3] != "y") {
          fail(line_no, "expected csv header 'frame,ped,x,y'");
        }
        header_seen = true;
        continue;
      }
    }
    if (fields.size() != 4) {
      fail(line_no, "expected 4 fields, found " + std::to_string(fields.size()));
    }
    Record r;
    r.frame = parse_integral(fields[0], line_no, "frame");
    r.ped = parse_integral(fields[1], line_no, "ped");
    r.x = parse_real(fields[2], line_no, "x");
    r.y = parse_real(fields[3], line_no, "y");
    scene.records.push_back(r);
    line_of.push_back(line_no);
    if (end == text.size()) break;
  }
  if (format == Format::kCsvSdd && !header_seen) fail(1, "missing csv header 'frame,ped,x,y'");

  // Duplicate detection with line numbers before sorting.
  std::vector<std::size_t> order(scene.records.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const Record& ra = scene.records[a];
    const Record& rb = scene.records[b];
    return ra.ped != rb.ped ? ra.ped < rb.ped : ra.frame < rb.frame;
  });
  for (std::size_t i = 1; i < order.size(); ++i) {
    const Record& a = scene.records[order[i - 1]];
    const Record& b = scene.records[order[i]];
    if (a.ped == b.ped && a.frame == b.frame) {
      fail(line_of[order[i]], "duplicate record for frame " + std::to_string(b.frame) + ", ped " +
                                  std::to_string(b.ped) + " (first seen on line " +
                                  std::to_string(line_of[order[i - 1]]) + ")");
    }
  }
  std::vector<Record> sorted;
  sorted.reserve(order.size());
  for (std::size_t i : order) sorted.push_back(scene.records[i]);
  scene.records = std::move(sorted);
  if (frame_step) {
    if (*frame_step <= 0) throw UsageError("frame_step must be positive");
    scene.frame_step = *frame_step;
  } else {
    scene.frame_step = infer_frame_step(scene.records);
  }
  return scene;
}

TrajectoryScene parse_scene(const std::filesystem::path& path, Format format,
                            std::optional<std::int64_t> frame_step) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read scene file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scene_text(buf.str(), format, path.stem().string(), frame_step);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::string serialize_scene(const TrajectoryScene& scene, Format format) {
  std::string out;
  const char sep = format == Format::kTsvFramePedXy ? '\t' : ',';
  if (format == Format::kCsvSdd) out += "frame,ped,x,y\n";
  for (const Record& r : scene.records) {
    out += std::to_string(r.frame);
    out += sep;
    out += std::to_string(r.ped);
    out += sep;
    append_number(out, r.x);
    out += sep;
    append_number(out, r.y);
    out += '\n';
  }
  return out;
}

void write_scene(const TrajectoryScene& scene, const std::filesystem::path& path, Format format) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write scene file " + path.string());
  out << serialize_scene(scene, format);
  if (!out) throw DataError("failed writing scene file " + path.string());
}

}  // namespace csr::scene
