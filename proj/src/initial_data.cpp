#include "pwlab/initial_data.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "pwlab/operators.hpp"
#include "pwlab/spectral_context.hpp"

namespace pwlab {

namespace {

std::array<int, 3> mode_numbers(const GridSpec& g, std::size_t m) {
  std::array<int, 3> out{0, 0, 0};
  for (int a = g.dim - 1; a >= 0; --a) {
    const auto N = static_cast<std::size_t>(g.points[a]);
    out[a] = g.mode_number(a, static_cast<int>(m % N));
    m /= N;
  }
  return out;
}

bool within_band(const GridSpec& g, const std::array<int, 3>& mn, int band) {
  for (int a = 0; a < g.dim; ++a) {
    if (std::abs(mn[a]) > band || 2 * std::abs(mn[a]) >= g.points[a]) return false;
  }
  return true;
}

void fill_random(SpectralField& f, int band, std::uint64_t seed) {
  const GridSpec& g = f.grid();
  const auto& k2 = spectral::Context::get(g).k2();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t m = 1; m < f.modes(); ++m) {
    const auto mn = mode_numbers(g, m);
    if (!within_band(g, mn, band)) continue;
    const double amp = 1.0 / (1.0 + k2[m]);
    for (int c = 0; c < f.components(); ++c) {
      const double re = normal(rng);
      const double im = normal(rng);
      f.at(c, m) = amp * Complex(re, im);
    }
  }
  if (f.is_real()) f.enforce_hermitian();
}

double smootherstep_cutoff(double rho) {
  if (rho <= 0.5) return 1.0;
  if (rho >= 1.0) return 0.0;
  const double q = 2.0 * rho - 1.0;
  return 1.0 - q * q * q * (q * (6.0 * q - 15.0) + 10.0);
}

// Minimum-image offset of x from the perturbation center.
std::array<double, 3> offset(const GridSpec& g, std::span<const double> x, const PerturbationSpec& spec) {
  std::array<double, 3> r{0.0, 0.0, 0.0};
  for (int a = 0; a < g.dim; ++a) {
    const double L = g.periods[a];
    const double c = spec.centered ? 0.5 * L : spec.center[a];
    double d = x[a] - c;
    d -= L * std::round(d / L);
    r[a] = d;
  }
  return r;
}

void validate_spec(const GridSpec& g, const PerturbationSpec& spec) {
  if (!(spec.radius > 0.0)) throw std::invalid_argument("perturbation: radius must be positive");
  if (spec.shape == PerturbationShape::vortex && !(spec.core > 0.0 && spec.core < spec.radius)) {
    throw std::invalid_argument("perturbation: vortex core must lie in (0, radius)");
  }
  for (int a = 0; a < g.dim; ++a) {
    if (2.0 * spec.radius > 0.5 * g.periods[a]) {
      throw std::invalid_argument("perturbation: support does not fit in half the box");
    }
  }
}

}  // namespace

SpectralField taylor_green_2d(const GridSpec& grid, double amplitude) {
  if (grid.dim != 2 || grid.periods[0] != grid.periods[1]) {
    throw std::invalid_argument("taylor_green_2d: needs a square 2D grid");
  }
  const double k = kTwoPi / grid.periods[0];
  return sample(grid, 2, [&](std::span<const double> x, std::span<double> out) {
    out[0] = amplitude * std::cos(k * x[0]) * std::sin(k * x[1]);
    out[1] = -amplitude * std::sin(k * x[0]) * std::cos(k * x[1]);
  });
}

SpectralField single_mode(const GridSpec& grid, std::array<int, 3> modes, std::array<Complex, 3> amplitude,
                          int components) {
  SpectralField f(grid, components, true);
  std::size_t m = 0;
  std::size_t mm = 0;
  for (int a = 0; a < grid.dim; ++a) {
    const auto N = static_cast<std::size_t>(grid.points[a]);
    m = m * N + static_cast<std::size_t>(grid.index_of_mode(a, modes[a]));
    mm = mm * N + static_cast<std::size_t>(grid.index_of_mode(a, -modes[a]) % grid.points[a]);
  }
  for (int c = 0; c < components; ++c) {
    f.at(c, m) += 0.5 * amplitude[c];
    f.at(c, mm) += 0.5 * std::conj(amplitude[c]);
  }
  return f;
}

SpectralField random_solenoidal(const GridSpec& grid, int band, double l2, std::uint64_t seed) {
  SpectralField f(grid, grid.dim, true);
  fill_random(f, band, seed);
  f = leray_project(f);
  remove_mean(f);
  const double n = l2_norm(f);
  if (n > 0.0) f *= l2 / n;
  return f;
}

SpectralField random_scalar(const GridSpec& grid, int band, double l2, std::uint64_t seed, bool real) {
  SpectralField f(grid, 1, real);
  fill_random(f, band, seed);
  remove_mean(f);
  const double n = l2_norm(f);
  if (n > 0.0) f *= l2 / n;
  return f;
}

PerturbationShape parse_shape(const std::string& name) {
  if (name == "bump") return PerturbationShape::bump;
  if (name == "vortex") return PerturbationShape::vortex;
  throw std::invalid_argument("perturbation: unknown shape '" + name + "' (expected bump|vortex)");
}

std::string to_string(PerturbationShape shape) {
  return shape == PerturbationShape::bump ? "bump" : "vortex";
}

SpectralField localized_perturbation(const GridSpec& grid, const PerturbationSpec& spec) {
  validate_spec(grid, spec);
  const int d = grid.dim;
  const double R = spec.radius;
  const double a = spec.core;
  SpectralField f = sample(grid, d, [&](std::span<const double> x, std::span<double> out) {
    const auto r = offset(grid, x, spec);
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += r[i] * r[i];
    const double rho = std::sqrt(r2) / R;
    for (auto& o : out) o = 0.0;
    if (rho >= 1.0) return;
    if (spec.shape == PerturbationShape::bump) {
      const double b = std::pow(1.0 - rho * rho, 4);
      for (int i = 0; i < d; ++i) out[i] = spec.amplitude * b / std::sqrt(static_cast<double>(d));
      return;
    }
    // swirl about the last-but-one axis pair: (x1, -x0) scaled by |v| / r
    const double rr = std::sqrt(r2);
    const double mag = rr / (r2 + a * a) * smootherstep_cutoff(rho);
    const double s = rr > 0.0 ? spec.amplitude * mag / rr : 0.0;
    out[0] = s * r[1];
    out[1] = -s * r[0];
  });
  zero_nyquist(f);
  f = leray_project(f);
  remove_mean(f);
  return f;
}

SpectralField localized_scalar(const GridSpec& grid, const PerturbationSpec& spec, bool real) {
  validate_spec(grid, spec);
  const int d = grid.dim;
  const double R = spec.radius;
  const double a = spec.core;
  auto profile = [&](std::span<const double> x) {
    const auto r = offset(grid, x, spec);
    double r2 = 0.0;
    for (int i = 0; i < d; ++i) r2 += r[i] * r[i];
    const double rho = std::sqrt(r2) / R;
    if (rho >= 1.0) return 0.0;
    if (spec.shape == PerturbationShape::bump) return spec.amplitude * std::pow(1.0 - rho * rho, 4);
    return spec.amplitude * smootherstep_cutoff(rho) / std::sqrt(r2 + a * a);
  };
  SpectralField f = real ? sample(grid, 1, [&](std::span<const double> x, std::span<double> out) { out[0] = profile(x); })
                         : sample_complex(grid, 1, [&](std::span<const double> x, std::span<Complex> out) {
                             out[0] = profile(x);
                           });
  zero_nyquist(f);
  remove_mean(f);
  return f;
}

}  // namespace pwlab
