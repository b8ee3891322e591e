#include "csr/kv_config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "csr/error.hpp"

namespace csr {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
  KeyValues kv;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    std::string key(trim(line.substr(0, eq)));
    std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw UsageError("config line " + std::to_string(line_no) + ": empty key");
    if (!kv.emplace(key, value).second) {
      throw UsageError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return kv;
}

KeyValues read_key_values(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read config file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_key_values(buf.str());
}

std::string format_key_values(const KeyValues& kv) {
  std::string out;
  for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
  return out;
}

void write_key_values(const std::filesystem::path& path, const KeyValues& kv) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write config file " + path.string());
  out << format_key_values(kv);
}

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

std::string KeyReader::text(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double KeyReader::real(const std::string& key, double fallback) {
  used_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& s = it->second;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError("config key '" + key + "': not a number: '" + s + "'");
  }
  return v;
}

std::int64_t KeyReader::integer(const std::string& key, std::int64_t fallback) {
  used_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& s = it->second;
  std::int64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("config key '" + key + "': not an integer: '" + s + "'");
  }
  return v;
}

bool KeyReader::flag(const std::string& key, bool fallback) {
  used_.insert(key);
  auto it = kv_.find(key);
  if (it == kv_.end()) return fallback;
  const std::string& s = it->second;
  if (s == "on" || s == "true" || s == "1" || s == "yes") return true;
  if (s == "off" || s == "false" || s == "0" || s == "no") return false;
  throw UsageError("config key '" + key + "': expected on/off, got '" + s + "'");
}

void KeyReader::reject_unknown() const {
  std::string unknown;
  for (const auto& [k, v] : kv_) {
    if (!used_.contains(k)) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) throw UsageError("unknown config keys: " + unknown);
}

}  // namespace csr
