#include "pwlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pwlab {

namespace {

bool fft_friendly(int n) {
  for (int f : {2, 3, 5}) {
    while (n % f == 0) n /= f;
  }
  return n == 1;
}

}  // namespace

GridSpec GridSpec::cube(int dim, int n, double period) {
  GridSpec g;
  g.dim = dim;
  g.points.assign(static_cast<std::size_t>(dim), n);
  g.periods.assign(static_cast<std::size_t>(dim), period);
  g.validate();
  return g;
}

GridSpec GridSpec::box(std::vector<int> points, std::vector<double> periods) {
  GridSpec g;
  g.dim = static_cast<int>(points.size());
  g.points = std::move(points);
  g.periods = std::move(periods);
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (dim != 2 && dim != 3) {
    throw std::invalid_argument("grid: dim must be 2 or 3, got " + std::to_string(dim));
  }
  if (points.size() != static_cast<std::size_t>(dim) ||
      periods.size() != static_cast<std::size_t>(dim)) {
    throw std::invalid_argument("grid: points/periods must have one entry per axis");
  }
  for (int n : points) {
    if (n < 8 || n % 2 != 0 || !fft_friendly(n)) {
      throw std::invalid_argument("grid: points per axis must be even, >= 8 and 2,3,5-smooth, got " +
                                  std::to_string(n));
    }
  }
  for (double L : periods) {
    if (!(L > 0.0) || !std::isfinite(L)) {
      throw std::invalid_argument("grid: periods must be positive and finite");
    }
  }
  if (!(dealias_fraction > 0.0 && dealias_fraction <= 1.0)) {
    throw std::invalid_argument("grid: dealias_fraction must lie in (0, 1]");
  }
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (int p : points) n *= static_cast<std::size_t>(p);
  return n;
}

double GridSpec::volume() const {
  double v = 1.0;
  for (double L : periods) v *= L;
  return v;
}

double GridSpec::min_spacing() const {
  double h = periods[0] / points[0];
  for (int a = 1; a < dim; ++a) h = std::min(h, periods[a] / points[a]);
  return h;
}

int GridSpec::mode_number(int axis, int i) const {
  const int n = points[axis];
  return i < n / 2 ? i : i - n;
}

int GridSpec::index_of_mode(int axis, int m) const {
  const int n = points[axis];
  if (m < -n / 2 || m > n / 2) {
    throw std::out_of_range("grid: mode number outside the resolved range");
  }
  return m >= 0 ? (m == n / 2 ? n / 2 : m) : m + n;
}

double GridSpec::wavenumber(int axis, int i) const {
  return kTwoPi * mode_number(axis, i) / periods[axis];
}

bool GridSpec::kept(int axis, int i) const {
  // Strict: 2|m| < f*N. For f = 2/3 this is Orszag's |m| < N/3.
  const int m = std::abs(mode_number(axis, i));
  return 2.0 * m < dealias_fraction * points[axis] - 1e-9;
}

}  // namespace pwlab
