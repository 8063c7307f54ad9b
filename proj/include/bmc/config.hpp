#pragma once

// Experiment configuration: a line-oriented "key = value" grammar with
// [section] headers, or the equivalent JSON object of objects. Every key has
// a type and a default; unknown sections or keys are rejected. canonical()
// prints every key in schema order, and parsing that text gives it back
// unchanged.
//
//   # comment            ; comment
//   [space]
//   p = 1.5
//   [estimator]
//   M = 16, 32, 64       (lists are comma separated)

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bmc {

enum class ValueType { Int, UInt, Real, Str, RealOrAuto, IntList, RealList, StrList };

struct ConfigKey {
  const char* section;
  const char* key;
  ValueType type;
  const char* default_value;
  const char* help;
};

/// The full schema in canonical order.
const std::vector<ConfigKey>& config_schema();

class ExperimentConfig {
 public:
  /// All keys at their defaults.
  ExperimentConfig();

  static ExperimentConfig parse_ini(const std::string& text);
  static ExperimentConfig parse_json(const std::string& text);
  /// JSON when the first non-space character is '{', otherwise INI.
  static ExperimentConfig parse(const std::string& text);
  static ExperimentConfig load(const std::string& path);

  /// Validates and stores `value` in canonical form.
  void set(const std::string& section, const std::string& key, const std::string& value);

  std::string canonical() const;
  std::string to_json() const;

  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::uint64_t get_uint(const std::string& section, const std::string& key) const;
  double get_real(const std::string& section, const std::string& key) const;
  std::string get_str(const std::string& section, const std::string& key) const;
  /// RealOrAuto keys: false when the value is "calibrate" or "auto".
  bool is_set(const std::string& section, const std::string& key) const;
  std::vector<std::int64_t> get_ints(const std::string& section, const std::string& key) const;
  std::vector<double> get_reals(const std::string& section, const std::string& key) const;
  std::vector<std::string> get_strs(const std::string& section, const std::string& key) const;

 private:
  const std::string& raw(const std::string& section, const std::string& key) const;
  std::map<std::string, std::map<std::string, std::string>> values_;
};

std::string config_help();

}  // namespace bmc
