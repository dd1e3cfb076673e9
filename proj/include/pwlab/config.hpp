#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwlab/rational.hpp"

namespace pwlab::config {

/// Flat text configuration:
///
///   # comment
///   solver.dt = 1e-3
///   wave.c = 1/2
///   solver.diag_p = 3, 6, inf
///
/// One `key = value` per line; keys are dotted identifiers; a `#` starts a comment.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueType { real, integer, boolean, text, rational, real_list };

std::string to_string(ValueType type);

struct KeyDef {
  std::string key;
  ValueType type = ValueType::real;
  std::optional<std::string> fallback;  // nullopt: required
  std::string help;
};

using Schema = std::vector<KeyDef>;

/// Raw key/value pairs in file order; duplicate keys and malformed lines are errors.
struct RawConfig {
  std::vector<std::pair<std::string, std::string>> entries;
  std::string origin;
};

RawConfig parse_text(const std::string& text, const std::string& origin = "<text>");
RawConfig parse_file(const std::filesystem::path& path);

/// Reals accept `inf`, `pi`, `<x>pi` and `<x>*pi`.
double parse_real(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
/// Shortest round-trip decimal form (`inf` for infinity).
std::string format_real(double x);

class Resolved {
 public:
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  Rational rational(const std::string& key) const;
  std::vector<double> reals(const std::string& key) const;
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  /// Replaces a value after checking it against the key's type.
  void set(const std::string& key, const std::string& value);

  /// Canonical values in schema order.
  const std::vector<std::pair<std::string, std::string>>& entries() const { return ordered_; }

 private:
  friend Resolved resolve(const RawConfig&, const Schema&);
  const std::string& lookup(const std::string& key, ValueType type) const;
  std::map<std::string, std::pair<ValueType, std::string>> values_;
  std::vector<std::pair<std::string, std::string>> ordered_;
};

/// Checks every key against the schema (unknown keys, missing required keys,
/// type mismatches) and materializes the defaults.
Resolved resolve(const RawConfig& raw, const Schema& schema);

}  // namespace pwlab::config
