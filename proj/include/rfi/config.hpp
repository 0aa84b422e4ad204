#pragma once

#include "rfi/types.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace rfi {

/// One `key = value` line of a scenario file.
struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

struct ConfigSection {
  std::string name;
  int line = 0;
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(std::string_view key) const;
  /// Throws ConfigError naming the first key not in `valid`.
  void require_keys(const std::vector<std::string>& valid) const;
};

struct ConfigDocument {
  std::vector<ConfigSection> sections;
  /// Leading `#` comment lines, without the marker.
  std::vector<std::string> header;

  const ConfigSection* find(std::string_view name) const;
};

/// Parses `[section]` headers and `key = value` entries; `#` starts a comment.
/// Throws ConfigError with the offending line number.
ConfigDocument parse_config(std::string_view text);
ConfigDocument parse_config_file(const std::string& path);

/// Value parsers. Reals accept plain numbers and multiples/fractions of pi
/// (`pi`, `pi/2`, `2*pi`, `-pi/4`).
double parse_real(const ConfigEntry& e);
std::uint64_t parse_u64(const ConfigEntry& e);
bool parse_bool(const ConfigEntry& e);
/// Comma-separated coordinates.
Point parse_point(const ConfigEntry& e);
/// Semicolon-separated points.
std::vector<Point> parse_point_list(const ConfigEntry& e);
/// Comma-separated reals.
std::vector<double> parse_real_list(const ConfigEntry& e);

}  // namespace rfi
