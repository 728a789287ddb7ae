#include "rsint/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace rsint {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool valid_key(std::string_view k) {
  if (k.empty() || !(std::isalpha(static_cast<unsigned char>(k[0])) || k[0] == '_')) return false;
  for (char c : k)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  return true;
}

// Strips a trailing comment that is not inside a quoted string.
std::string_view strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string scalar_item(std::string_view raw, const std::string& where) {
  raw = trim(raw);
  if (raw.empty()) throw ConfigError(where + ": empty value");
  if (raw.front() == '"') {
    if (raw.size() < 2 || raw.back() != '"') throw ConfigError(where + ": unterminated string");
    const std::string_view body = raw.substr(1, raw.size() - 2);
    if (body.find('"') != std::string_view::npos) throw ConfigError(where + ": stray quote in string");
    return std::string(body);
  }
  for (char c : raw)
    if (c == '"' || c == '[' || c == ']' || c == ',' || std::isspace(static_cast<unsigned char>(c)))
      throw ConfigError(where + ": malformed value '" + std::string(raw) + "'");
  return std::string(raw);
}

double to_double(const std::string& s, const std::string& key) {
  double v = 0.0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size() || !std::isfinite(v))
    throw ConfigError("key '" + key + "': expected a number, got '" + s + "'");
  return v;
}

std::int64_t to_int(const std::string& s, const std::string& key) {
  std::int64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + s + "'");
  return v;
}

}  // namespace

Config Config::parse(std::string_view text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no);

    line = trim(strip_comment(line));
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + key + "'");
    if (cfg.values_.count(key)) throw ConfigError(where + ": duplicate key '" + key + "'");

    const std::string_view raw = trim(line.substr(eq + 1));
    ConfigValue val;
    if (!raw.empty() && raw.front() == '[') {
      if (raw.back() != ']') throw ConfigError(where + ": unterminated list");
      val.is_list = true;
      const std::string_view body = trim(raw.substr(1, raw.size() - 2));
      if (!body.empty()) {
        std::string_view rest = body;
        while (true) {
          const std::size_t comma = rest.find(',');
          val.items.push_back(scalar_item(rest.substr(0, comma), where));
          if (comma == std::string_view::npos) break;
          rest = rest.substr(comma + 1);
        }
      }
      std::string echo = "[";
      for (std::size_t i = 0; i < val.items.size(); ++i) echo += (i ? ", " : "") + val.items[i];
      val.text = echo + "]";
    } else {
      val.items.push_back(scalar_item(raw, where));
      val.text = val.items.front();
    }
    cfg.values_.emplace(key, std::move(val));
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void Config::set(const std::string& key, const std::string& value) {
  ConfigValue v;
  v.items.push_back(value);
  v.text = value;
  values_[key] = std::move(v);
}

const ConfigValue& Config::scalar(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  if (it->second.is_list) throw ConfigError("key '" + key + "' expects a scalar, not a list");
  return it->second;
}

std::string Config::get_string(const std::string& key) const { return scalar(key).items.front(); }
std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  return has(key) ? get_string(key) : fallback;
}

double Config::get_double(const std::string& key) const { return to_double(scalar(key).items.front(), key); }
double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::int64_t Config::get_int(const std::string& key, std::int64_t fallback) const {
  return has(key) ? to_int(scalar(key).items.front(), key) : fallback;
}

std::uint64_t Config::get_uint(const std::string& key) const {
  const std::string& s = scalar(key).items.front();
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw ConfigError("key '" + key + "': expected a non-negative integer, got '" + s + "'");
  return v;
}
std::uint64_t Config::get_uint(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<double> out;
  for (const std::string& s : values_.at(key).items) out.push_back(to_double(s, key));
  return out;
}

std::vector<int> Config::get_ints(const std::string& key, const std::vector<int>& fallback) const {
  if (!has(key)) return fallback;
  std::vector<int> out;
  for (const std::string& s : values_.at(key).items) {
    const std::int64_t v = to_int(s, key);
    if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max())
      throw ConfigError("key '" + key + "': integer out of range");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
  return has(key) ? values_.at(key).items : fallback;
}

void Config::require_known(const std::set<std::string>& allowed) const {
  for (const auto& [key, _] : values_)
    if (!allowed.count(key)) throw ConfigError(source_ + ": unknown key '" + key + "'");
}

}  // namespace rsint
