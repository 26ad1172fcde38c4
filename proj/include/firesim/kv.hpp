#pragma once

// Flat `key = value` text documents and atomic file output.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <utility>
#include <vector>

#include "firesim/error.hpp"

namespace firesim {

namespace fs = std::filesystem;

/// Shortest representation that parses back to the same double; "inf"/"-inf" for infinities.
inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || std::isnan(v)) return std::nullopt;
  return v;
}

inline std::optional<std::uint64_t> parse_uint(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

inline std::string frame_name(std::string_view prefix, std::size_t index, std::string_view ext) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return std::string(prefix) + buf + std::string(ext);
}

/// Ordered key/value document. Keys are unique; set() overwrites in place.
class KeyValues {
 public:
  void set(std::string key, std::string value) {
    for (auto& kv : entries_) {
      if (kv.first == key) {
        kv.second = std::move(value);
        return;
      }
    }
    entries_.emplace_back(std::move(key), std::move(value));
  }
  void set(std::string key, double value) { set(std::move(key), format_double(value)); }
  void set(std::string key, std::size_t value) { set(std::move(key), std::to_string(value)); }
  void set(std::string key, bool value) { set(std::move(key), std::string(value ? "true" : "false")); }
  void set(std::string key, const char* value) { set(std::move(key), std::string(value)); }

  bool contains(std::string_view key) const { return find(key) != nullptr; }

  const std::string* find(std::string_view key) const {
    for (const auto& kv : entries_)
      if (kv.first == key) return &kv.second;
    return nullptr;
  }

  const std::string& at(std::string_view key) const {
    const std::string* v = find(key);
    if (!v) fail(ErrorCode::BadConfig, source_ + ": missing key '" + std::string(key) + "'");
    return *v;
  }

  double get_double(std::string_view key) const {
    const auto v = parse_double(at(key));
    if (!v) fail(ErrorCode::BadConfig, source_ + ": '" + std::string(key) + "' is not a number: " + at(key));
    return *v;
  }

  std::uint64_t get_uint(std::string_view key) const {
    const auto v = parse_uint(at(key));
    if (!v) fail(ErrorCode::BadConfig, source_ + ": '" + std::string(key) + "' is not a count: " + at(key));
    return *v;
  }

  bool get_bool(std::string_view key) const {
    const std::string& v = at(key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    fail(ErrorCode::BadConfig, source_ + ": '" + std::string(key) + "' is not a boolean: " + v);
  }

  const std::vector<std::pair<std::string, std::string>>& entries() const& noexcept { return entries_; }
  std::vector<std::pair<std::string, std::string>> entries() && { return std::move(entries_); }
  const std::string& source() const noexcept { return source_; }
  void set_source(std::string s) { source_ = std::move(s); }

  /// Lines are `key = value`; blank lines and lines starting with '#' are skipped.
  static KeyValues parse(std::string_view text, std::string source = "<text>") {
    KeyValues out;
    out.source_ = std::move(source);
    std::size_t line_no = 0;
    while (!text.empty()) {
      const std::size_t nl = text.find('\n');
      std::string_view line = text.substr(0, nl);
      text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
      ++line_no;
      line = trim(line);
      if (line.empty() || line.front() == '#') continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos)
        fail(ErrorCode::BadConfig, out.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
      const std::string_view key = trim(line.substr(0, eq));
      const std::string_view value = trim(line.substr(eq + 1));
      if (key.empty()) fail(ErrorCode::BadConfig, out.source_ + ":" + std::to_string(line_no) + ": empty key");
      if (out.contains(key))
        fail(ErrorCode::BadConfig, out.source_ + ":" + std::to_string(line_no) + ": duplicate key '" +
                                       std::string(key) + "'");
      out.entries_.emplace_back(std::string(key), std::string(value));
    }
    return out;
  }

  std::string serialize(std::string_view header = {}) const {
    std::string out;
    if (!header.empty()) out += "# " + std::string(header) + "\n";
    for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
    return out;
  }

 private:
  static std::string_view trim(std::string_view s) {
    const auto ws = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
    while (!s.empty() && ws(s.front())) s.remove_prefix(1);
    while (!s.empty() && ws(s.back())) s.remove_suffix(1);
    return s;
  }

  std::vector<std::pair<std::string, std::string>> entries_;
  std::string source_ = "<text>";
};

inline std::string read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "read error on " + path.string());
  return std::move(ss).str();
}

/// Writes to a sibling temporary file, then renames it over `path`.
inline void write_file_atomic(const fs::path& path, std::string_view bytes) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot create " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) fail(ErrorCode::Io, "write error on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot rename into " + path.string());
  }
}

inline void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) fail(ErrorCode::Io, "cannot create directory " + dir.string());
}

inline KeyValues read_kv_file(const fs::path& path) {
  return KeyValues::parse(read_file_bytes(path), path.string());
}

inline void write_kv_file(const fs::path& path, const KeyValues& kv, std::string_view header = {}) {
  write_file_atomic(path, kv.serialize(header));
}

}  // namespace firesim
