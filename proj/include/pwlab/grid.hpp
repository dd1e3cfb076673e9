#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace pwlab {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Periodic box discretization: `points[a]` samples over `[0, periods[a])` on each axis.
///
/// Flat indices are row-major with the last axis fastest, both in physical
/// space and in the (FFT-ordered) spectral arrays.
struct GridSpec {
  int dim = 0;
  std::vector<int> points;
  std::vector<double> periods;
  double dealias_fraction = 2.0 / 3.0;

  static GridSpec cube(int dim, int n, double period = kTwoPi);
  static GridSpec box(std::vector<int> points, std::vector<double> periods);

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;

  std::size_t size() const;
  double volume() const;
  double cell_volume() const { return volume() / static_cast<double>(size()); }
  double min_spacing() const;

  /// Signed mode number for array index `i` on `axis` (Nyquist reported as -N/2).
  int mode_number(int axis, int i) const;
  /// Array index of signed mode number `m` on `axis`; m must lie in [-N/2, N/2].
  int index_of_mode(int axis, int m) const;
  double wavenumber(int axis, int i) const;

  /// True when the mode survives the dealiasing truncation.
  bool kept(int axis, int i) const;

  bool operator==(const GridSpec&) const = default;
};

}  // namespace pwlab
