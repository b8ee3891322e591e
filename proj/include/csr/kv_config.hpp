#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace csr {

// Plain `key = value` text. '#' starts a comment line; blank lines are
// ignored; keys are kebab-case. Later duplicates are an error.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(std::string_view text);
KeyValues read_key_values(const std::filesystem::path& path);
std::string format_key_values(const KeyValues& kv);
void write_key_values(const std::filesystem::path& path, const KeyValues& kv);

// Shortest decimal text that parses back to exactly `v`.
std::string format_real(double v);

// Typed access that tracks which keys were consumed, so leftovers can be
// rejected as unknown.
class KeyReader {
 public:
  explicit KeyReader(KeyValues kv) : kv_(std::move(kv)) {}

  std::string text(const std::string& key, const std::string& fallback);
  double real(const std::string& key, double fallback);
  std::int64_t integer(const std::string& key, std::int64_t fallback);
  bool flag(const std::string& key, bool fallback);
  bool has(const std::string& key) const { return kv_.contains(key); }

  // UsageError listing every key never read.
  void reject_unknown() const;

 private:
  KeyValues kv_;
  std::set<std::string> used_;
};

}  // namespace csr
