#include "pwlab/rational.hpp"

#include <numeric>
#include <stdexcept>

namespace pwlab {

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num < 0 ? -num : num, den);
  return Rational{num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

Rational Rational::parse(const std::string& text) {
  try {
    const auto slash = text.find('/');
    std::size_t used = 0;
    if (slash == std::string::npos) {
      const long long v = std::stoll(text, &used);
      if (used != text.size()) throw std::invalid_argument("trailing characters");
      return make(v, 1);
    }
    const std::string a = text.substr(0, slash);
    const std::string b = text.substr(slash + 1);
    std::size_t ua = 0;
    std::size_t ub = 0;
    const long long n = std::stoll(a, &ua);
    const long long d = std::stoll(b, &ub);
    if (ua != a.size() || ub != b.size()) throw std::invalid_argument("trailing characters");
    return make(n, d);
  } catch (const std::invalid_argument&) {
    throw std::invalid_argument("rational: cannot parse '" + text + "' (expected m/n)");
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("rational: '" + text + "' out of range");
  }
}

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

}  // namespace pwlab
