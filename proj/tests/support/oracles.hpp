#pragma once

// Test-only reference computations. Nothing here calls into the transform or
// multiplier code of the library; fields are read and written coefficient by
// coefficient.

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

#include "pwlab/spectral_field.hpp"

namespace oracle {

using pwlab::Complex;
using pwlab::GridSpec;
using pwlab::SpectralField;

inline int signed_mode(int i, int n) { return i < n / 2 ? i : i - n; }

inline std::size_t flat_of(const GridSpec& g, const int* idx) {
  std::size_t f = 0;
  for (int a = 0; a < g.dim; ++a) f = f * static_cast<std::size_t>(g.points[a]) + static_cast<std::size_t>(idx[a]);
  return f;
}

inline void unflatten(const GridSpec& g, std::size_t flat, int* idx) {
  for (int a = g.dim - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(g.points[a]));
    flat /= static_cast<std::size_t>(g.points[a]);
  }
}

// P((u.grad)u) by direct summation over interacting mode pairs, truncated to
// |m_a| < N_a/3 on every axis. Input must be band-limited to the same set.
inline SpectralField brute_convective(const SpectralField& u) {
  const GridSpec& g = u.grid();
  const int d = g.dim;
  const std::size_t n = g.size();
  auto kept = [&](const int* m) {
    for (int a = 0; a < d; ++a) {
      if (3 * std::abs(m[a]) >= g.points[a]) return false;
    }
    return true;
  };
  std::vector<std::size_t> active;
  std::vector<std::array<int, 3>> modes(n);
  for (std::size_t f = 0; f < n; ++f) {
    int idx[3] = {0, 0, 0};
    unflatten(g, f, idx);
    for (int a = 0; a < d; ++a) modes[f][a] = signed_mode(idx[a], g.points[a]);
    bool nz = false;
    for (int c = 0; c < d; ++c) nz = nz || std::abs(u.at(c, f)) > 0.0;
    if (nz) active.push_back(f);
  }
  SpectralField out(g, d, true);
  for (std::size_t p : active) {
    for (std::size_t q : active) {
      int m[3] = {0, 0, 0};
      for (int a = 0; a < d; ++a) m[a] = modes[p][a] + modes[q][a];
      if (!kept(m)) continue;
      int idx[3] = {0, 0, 0};
      for (int a = 0; a < d; ++a) idx[a] = (m[a] + g.points[a]) % g.points[a];
      const std::size_t k = flat_of(g, idx);
      // (u_p . i q) u_q
      Complex s{};
      for (int a = 0; a < d; ++a) {
        const double qa = 2.0 * std::numbers::pi * modes[q][a] / g.periods[a];
        s += u.at(a, p) * Complex(0.0, qa);
      }
      for (int c = 0; c < d; ++c) out.at(c, k) += s * u.at(c, q);
    }
  }
  // Leray projection by hand.
  for (std::size_t f = 1; f < n; ++f) {
    double k[3] = {0, 0, 0};
    double k2 = 0.0;
    for (int a = 0; a < d; ++a) {
      k[a] = 2.0 * std::numbers::pi * modes[f][a] / g.periods[a];
      k2 += k[a] * k[a];
    }
    Complex kf{};
    for (int a = 0; a < d; ++a) kf += k[a] * out.at(a, f);
    for (int a = 0; a < d; ++a) out.at(a, f) -= k[a] * kf / k2;
  }
  return out;
}

// Gaussian A exp(-|x|^2 / (2 s2)) on R^d.
struct Gaussian {
  int d = 3;
  double amplitude = 1.0;
  double s2 = 1.0;

  double value(double r2) const { return amplitude * std::exp(-r2 / (2.0 * s2)); }
  // Heat flow e^{t Delta} with nu = 1: variance grows by 2t, mass preserved.
  Gaussian evolved(double t) const {
    const double s2t = s2 + 2.0 * t;
    return {d, amplitude * std::pow(s2 / s2t, 0.5 * d), s2t};
  }
  double lp(double p) const {
    if (std::isinf(p)) return std::abs(amplitude);
    return std::abs(amplitude) * std::pow(2.0 * std::numbers::pi * s2 / p, 0.5 * d / p);
  }
  // L^p norm of |grad G| = |A| r/s2 exp(-r^2/(2 s2)).
  double grad_lp(double p) const {
    const double a = std::abs(amplitude) / s2;
    if (std::isinf(p)) return a * std::sqrt(s2) * std::exp(-0.5);
    // int r^p exp(-p r^2/(2 s2)) d^d x = omega_{d-1} * 0.5 * (2 s2/p)^{(p+d)/2} Gamma((p+d)/2)
    const double omega = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
    const double integral = omega * 0.5 * std::pow(2.0 * s2 / p, 0.5 * (p + d)) * std::tgamma(0.5 * (p + d));
    return a * std::pow(integral, 1.0 / p);
  }
};

// Minimum-image squared distance from the box center.
inline double centered_r2(const GridSpec& g, const double* x) {
  double r2 = 0.0;
  for (int a = 0; a < g.dim; ++a) {
    const double dx = x[a] - 0.5 * g.periods[a];
    r2 += dx * dx;
  }
  return r2;
}

// Fourth-order centered first derivative from five equally spaced samples.
inline double fd5(const std::function<double(double)>& f, double t, double h) {
  return (f(t - 2 * h) - 8 * f(t - h) + 8 * f(t + h) - f(t + 2 * h)) / (12 * h);
}

}  // namespace oracle
