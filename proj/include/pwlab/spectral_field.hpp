#pragma once

#include <span>
#include <vector>

#include "pwlab/grid.hpp"

namespace pwlab {

/// Fourier-series coefficients of a (vector) field on a periodic grid.
///
/// Coefficients are normalized so that f(x) = sum_k c_k exp(i k.x); the full
/// FFT-ordered spectrum is stored for every component. `is_real()` marks
/// fields representing real-valued functions, whose spectra are Hermitian.
class SpectralField {
 public:
  SpectralField() = default;
  SpectralField(GridSpec grid, int components, bool real = true);

  const GridSpec& grid() const { return grid_; }
  int components() const { return components_; }
  bool is_real() const { return real_; }
  std::size_t modes() const { return modes_; }
  bool empty() const { return components_ == 0; }

  std::span<Complex> component(int c);
  std::span<const Complex> component(int c) const;
  Complex& at(int c, std::size_t mode) { return coeffs_[static_cast<std::size_t>(c) * modes_ + mode]; }
  const Complex& at(int c, std::size_t mode) const {
    return coeffs_[static_cast<std::size_t>(c) * modes_ + mode];
  }
  std::vector<Complex>& coeffs() { return coeffs_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }

  void set_zero();
  /// Throws std::invalid_argument when grids, component counts or realness differ.
  void check_compatible(const SpectralField& other) const;

  SpectralField& operator+=(const SpectralField& other);
  SpectralField& operator-=(const SpectralField& other);
  SpectralField& operator*=(double a);
  SpectralField& operator*=(Complex a);
  /// this += a * x
  void axpy(double a, const SpectralField& x);

  /// Largest |c(-k) - conj(c(k))| over all modes and components.
  double hermitian_defect() const;
  /// Replaces coefficients by the Hermitian part (no-op semantics for real fields).
  void enforce_hermitian();

 private:
  GridSpec grid_;
  int components_ = 0;
  bool real_ = true;
  std::size_t modes_ = 0;
  std::vector<Complex> coeffs_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(double s, SpectralField a);

/// Scalar pressure with the k = 0 coefficient pinned to zero.
class PressureField {
 public:
  explicit PressureField(SpectralField scalar);
  const GridSpec& grid() const { return field_.grid(); }
  const SpectralField& field() const { return field_; }
  const std::vector<Complex>& coeffs() const { return field_.coeffs(); }
  bool zero_mean() const { return true; }

 private:
  SpectralField field_;
};

}  // namespace pwlab
