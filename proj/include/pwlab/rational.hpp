#pragma once

#include <cstdint>
#include <string>

namespace pwlab {

/// Wave speed c = num/den kept exact for the plane-wave lattice map.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  /// Reduces to lowest terms with den > 0; throws on den == 0.
  static Rational make(std::int64_t num, std::int64_t den);
  /// Parses "m/n" or an integer.
  static Rational parse(const std::string& text);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  bool operator==(const Rational&) const = default;
};

}  // namespace pwlab
