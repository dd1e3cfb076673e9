#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "pwlab/spectral_field.hpp"

namespace pwlab {

/// u = A (cos(k x) sin(k y), -sin(k x) cos(k y)) with k = 2 pi / L_x; L_x must equal L_y.
SpectralField taylor_green_2d(const GridSpec& grid, double amplitude = 1.0);

/// Real field with a single Fourier pair: amplitude/2 at `modes`, conjugate at -modes.
SpectralField single_mode(const GridSpec& grid, std::array<int, 3> modes, std::array<Complex, 3> amplitude,
                          int components);

/// Random divergence-free zero-mean field with modes |m_a| <= band on every axis,
/// spectrum ~ (1+|k|^2)^-1, Nyquist-free, scaled to the given L^2 norm.
SpectralField random_solenoidal(const GridSpec& grid, int band, double l2, std::uint64_t seed);

/// Random zero-mean scalar (real or complex) with the same band/spectrum rules.
SpectralField random_scalar(const GridSpec& grid, int band, double l2, std::uint64_t seed, bool real = true);

enum class PerturbationShape {
  bump,    // polynomial bump (1-(r/R)^2)^4 along a fixed direction, then projected
  vortex,  // swirl ~ 1/r for core < r < R/2, smoothly cut off at R (exactly solenoidal)
};

PerturbationShape parse_shape(const std::string& name);
std::string to_string(PerturbationShape shape);

/// Compactly supported perturbation centered in a periodic box.
struct PerturbationSpec {
  PerturbationShape shape = PerturbationShape::vortex;
  double amplitude = 1.0;
  double radius = 1.0;  // support radius R
  double core = 0.25;   // vortex core a (ignored by bump)
  std::array<double, 3> center{0.0, 0.0, 0.0};
  bool centered = true;  // center at the box midpoint, ignoring `center`
};

/// Divergence-free, zero-mean, Nyquist-free vector perturbation.
SpectralField localized_perturbation(const GridSpec& grid, const PerturbationSpec& spec);
/// Scalar analogue (CGL): 1/sqrt(r^2+a^2) cut off at R for vortex, the bump profile otherwise.
SpectralField localized_scalar(const GridSpec& grid, const PerturbationSpec& spec, bool real = false);

}  // namespace pwlab
