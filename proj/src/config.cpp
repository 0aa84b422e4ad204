#include "rfi/config.hpp"

#include "rfi/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

namespace rfi {
namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

double parse_real_text(const std::string& raw, int line, const std::string& key) {
  const std::string text = trim(raw);
  double value = 0.0;
  if (parse_number(text, value)) return value;

  // [sign][factor*]pi[/divisor]
  std::string rest = text;
  double sign = 1.0;
  if (!rest.empty() && (rest[0] == '-' || rest[0] == '+')) {
    sign = rest[0] == '-' ? -1.0 : 1.0;
    rest = trim(rest.substr(1));
  }
  double factor = 1.0;
  double divisor = 1.0;
  const auto pi_pos = rest.find("pi");
  bool ok = pi_pos != std::string::npos;
  if (ok && pi_pos > 0) {
    std::string head = trim(rest.substr(0, pi_pos));
    ok = !head.empty() && head.back() == '*' && parse_number(trim(head.substr(0, head.size() - 1)), factor);
  }
  if (ok) {
    std::string tail = trim(rest.substr(pi_pos + 2));
    if (!tail.empty()) {
      ok = tail[0] == '/' && parse_number(trim(tail.substr(1)), divisor) && divisor != 0.0;
    }
  }
  if (!ok) throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a real number", line);
  return sign * factor * std::numbers::pi / divisor;
}

}  // namespace

const ConfigEntry* ConfigSection::find(std::string_view key) const {
  for (const auto& e : entries) {
    if (e.key == key) return &e;
  }
  return nullptr;
}

void ConfigSection::require_keys(const std::vector<std::string>& valid) const {
  for (const auto& e : entries) {
    if (std::find(valid.begin(), valid.end(), e.key) == valid.end()) {
      std::string list;
      for (const auto& v : valid) list += (list.empty() ? "" : ", ") + v;
      throw ConfigError("unknown key '" + e.key + "' in [" + name + "] (valid keys: " + list + ")", e.line);
    }
  }
}

const ConfigSection* ConfigDocument::find(std::string_view name) const {
  for (const auto& s : sections) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

ConfigDocument parse_config(std::string_view text) {
  ConfigDocument doc;
  bool in_header = true;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto end = text.find('\n', start);
    std::string_view raw = text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    start = end == std::string_view::npos ? text.size() + 1 : end + 1;
    ++line_no;

    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (in_header) doc.header.push_back(trim(line.substr(1)));
      continue;
    }
    in_header = false;
    if (const auto hash = line.find(" #"); hash != std::string::npos) line = trim(line.substr(0, hash));

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) throw ConfigError("malformed section header '" + line + "'", line_no);
      std::string name = trim(line.substr(1, line.size() - 2));
      if (doc.find(name)) throw ConfigError("duplicate section [" + name + "]", line_no);
      doc.sections.push_back({std::move(name), line_no, {}});
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    if (doc.sections.empty()) throw ConfigError("entry outside of any [section]", line_no);
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    auto& section = doc.sections.back();
    if (section.find(key)) throw ConfigError("duplicate key '" + key + "' in [" + section.name + "]", line_no);
    section.entries.push_back({std::move(key), std::move(value), line_no});
  }
  if (doc.sections.empty()) throw ConfigError("scenario file contains no sections");
  return doc;
}

ConfigDocument parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

double parse_real(const ConfigEntry& e) { return parse_real_text(e.value, e.line, e.key); }

std::uint64_t parse_u64(const ConfigEntry& e) {
  const std::string text = trim(e.value);
  if (text.empty() || text[0] == '-') throw ConfigError("key '" + e.key + "': expected a non-negative integer", e.line);
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(text.c_str(), &end, 10);
  if (errno != 0 || end != text.c_str() + text.size()) {
    // Accept integral reals such as 1e5.
    double d = 0.0;
    if (parse_number(text, d) && d >= 0.0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
    throw ConfigError("key '" + e.key + "': expected a non-negative integer, got '" + text + "'", e.line);
  }
  return v;
}

bool parse_bool(const ConfigEntry& e) {
  const std::string v = trim(e.value);
  if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
  if (v == "false" || v == "no" || v == "off" || v == "0") return false;
  throw ConfigError("key '" + e.key + "': expected true/false, got '" + v + "'", e.line);
}

std::vector<double> parse_real_list(const ConfigEntry& e) {
  std::vector<double> out;
  for (const auto& item : split(e.value, ',')) out.push_back(parse_real_text(item, e.line, e.key));
  return out;
}

Point parse_point(const ConfigEntry& e) {
  const auto coords = parse_real_list(e);
  Point p(static_cast<Eigen::Index>(coords.size()));
  for (std::size_t i = 0; i < coords.size(); ++i) p[static_cast<Eigen::Index>(i)] = coords[i];
  return p;
}

std::vector<Point> parse_point_list(const ConfigEntry& e) {
  std::vector<Point> out;
  for (const auto& item : split(e.value, ';')) {
    if (item.empty()) continue;
    out.push_back(parse_point(ConfigEntry{e.key, item, e.line}));
  }
  return out;
}

}  // namespace rfi
