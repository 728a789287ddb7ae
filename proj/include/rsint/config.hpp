#pragma once

// Flat key = value experiment configs.
//
//   # comment
//   experiment = rate
//   seed = 1
//   driver = "indicator"
//   mesh_exponents = [4, 5, 6, 7]
//
// One key per line; values are bare scalars, double-quoted strings or
// bracketed comma-separated lists.  Keys may not repeat.

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "rsint/errors.hpp"

namespace rsint {

/// Malformed config text or a bad value; maps to the usage exit code.
class ConfigError : public ArgumentError {
 public:
  using ArgumentError::ArgumentError;
};

struct ConfigValue {
  bool is_list = false;
  std::vector<std::string> items;  ///< one item for scalars
  std::string text;                ///< canonical echo of the value
};

class Config {
 public:
  static Config parse(std::string_view text, const std::string& source = "<config>");
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  /// Replaces or adds a scalar value.
  void set(const std::string& key, const std::string& value);

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_uint(const std::string& key) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

  /// Throws ConfigError naming the first key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

  const std::map<std::string, ConfigValue>& entries() const noexcept { return values_; }
  const std::string& source() const noexcept { return source_; }

 private:
  const ConfigValue& scalar(const std::string& key) const;

  std::string source_;
  std::map<std::string, ConfigValue> values_;
};

}  // namespace rsint
