#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace csr::scene {

struct Record {
  std::int64_t frame = 0;
  std::int64_t ped = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Record&, const Record&) = default;
};

// On-disk trajectory formats.
//   tsv-frame-ped-xy: one record per line, `frame ped x y` separated by
//                     whitespace. Blank lines and lines starting with '#'
//                     are skipped.
//   csv-sdd:          header line `frame,ped,x,y`, then one record per line.
// frame and ped must be integral (a zero fractional part such as "780.0" is
// accepted); x and y are decimals.
enum class Format { kTsvFramePedXy, kCsvSdd };

Format parse_format(std::string_view name);
std::string_view format_name(Format f);

// All records of one contiguous recording, sorted by (ped, frame) with
// unique (frame, ped) pairs.
struct TrajectoryScene {
  std::string scene_id;
  std::vector<Record> records;
  std::int64_t frame_step = 1;

  friend bool operator==(const TrajectoryScene&, const TrajectoryScene&) = default;
};

// Greatest common divisor of consecutive per-pedestrian frame differences,
// or 1 when no pedestrian has two records.
std::int64_t infer_frame_step(const std::vector<Record>& sorted_records);

// Parses text in the given format. Malformed lines raise DataError naming the
// 1-based line number. frame_step is inferred unless given.
TrajectoryScene parse_scene_text(std::string_view text, Format format, std::string scene_id,
                                 std::optional<std::int64_t> frame_step = std::nullopt);

// Reads a file; the scene id is the file stem.
TrajectoryScene parse_scene(const std::filesystem::path& path, Format format,
                            std::optional<std::int64_t> frame_step = std::nullopt);

// Shortest round-trip decimal representation of every value.
std::string serialize_scene(const TrajectoryScene& scene, Format format);
void write_scene(const TrajectoryScene& scene, const std::filesystem::path& path, Format format);

// Sorts by (ped, frame) and rejects duplicate (frame, ped) pairs.
void normalize_records(std::vector<Record>& records);

}  // namespace csr::scene
