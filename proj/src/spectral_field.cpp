#include "pwlab/spectral_field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pwlab/spectral_context.hpp"

namespace pwlab {

SpectralField::SpectralField(GridSpec grid, int components, bool real)
    : grid_(std::move(grid)), components_(components), real_(real) {
  grid_.validate();
  if (components < 1) throw std::invalid_argument("field: components must be >= 1");
  modes_ = grid_.size();
  coeffs_.assign(modes_ * static_cast<std::size_t>(components_), Complex{});
}

std::span<Complex> SpectralField::component(int c) {
  return {coeffs_.data() + static_cast<std::size_t>(c) * modes_, modes_};
}

std::span<const Complex> SpectralField::component(int c) const {
  return {coeffs_.data() + static_cast<std::size_t>(c) * modes_, modes_};
}

void SpectralField::set_zero() { std::fill(coeffs_.begin(), coeffs_.end(), Complex{}); }

void SpectralField::check_compatible(const SpectralField& other) const {
  if (!(grid_ == other.grid_)) throw std::invalid_argument("field: grid mismatch");
  if (components_ != other.components_) throw std::invalid_argument("field: component mismatch");
  if (real_ != other.real_) throw std::invalid_argument("field: real/complex mismatch");
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
  check_compatible(other);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= other.coeffs_[i];
  return *this;
}

SpectralField& SpectralField::operator*=(double a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

SpectralField& SpectralField::operator*=(Complex a) {
  for (auto& c : coeffs_) c *= a;
  return *this;
}

void SpectralField::axpy(double a, const SpectralField& x) {
  check_compatible(x);
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += a * x.coeffs_[i];
}

double SpectralField::hermitian_defect() const {
  const auto& mirror = spectral::Context::get(grid_).mirror();
  double worst = 0.0;
  for (int c = 0; c < components_; ++c) {
    auto f = component(c);
    for (std::size_t m = 0; m < modes_; ++m) {
      worst = std::max(worst, std::abs(f[mirror[m]] - std::conj(f[m])));
    }
  }
  return worst;
}

void SpectralField::enforce_hermitian() {
  const auto& mirror = spectral::Context::get(grid_).mirror();
  for (int c = 0; c < components_; ++c) {
    auto f = component(c);
    for (std::size_t m = 0; m < modes_; ++m) {
      const std::size_t j = mirror[m];
      if (j < m) continue;
      const Complex avg = 0.5 * (f[m] + std::conj(f[j]));
      f[m] = avg;
      f[j] = std::conj(avg);
    }
  }
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(double s, SpectralField a) { return a *= s; }

PressureField::PressureField(SpectralField scalar) : field_(std::move(scalar)) {
  if (field_.components() != 1) throw std::invalid_argument("pressure: must be scalar");
  field_.at(0, 0) = Complex{};
}

}  // namespace pwlab
