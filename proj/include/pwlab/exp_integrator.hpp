#pragma once

#include <array>
#include <functional>
#include <vector>

#include "pwlab/spectral_field.hpp"

namespace pwlab {

/// Input states of the four RK4 stages of one step.
struct StageSet {
  std::array<SpectralField, 4> u;
};

/// Integrating-factor RK4 for u_t = L u + N(u) with L diagonal in Fourier space.
///
/// `rates[m]` is the symbol of L at mode m (e.g. -nu |k|^2). The linear part
/// is applied exactly; only N is integrated by the RK4 tableau. The RHS
/// callback receives the stage index (0..3) so that externally supplied
/// background fields can be matched stage by stage.
class IfRk4 {
 public:
  using Rhs = std::function<void(const SpectralField& state, int stage, SpectralField& out)>;

  IfRk4(const std::vector<Complex>& rates, double dt);

  double dt() const { return dt_; }
  void step(SpectralField& u, const Rhs& rhs, StageSet* record = nullptr) const;

 private:
  void scale(SpectralField& f, const std::vector<Complex>& e) const;

  double dt_;
  std::vector<Complex> half_;
  std::vector<Complex> full_;
};

/// phi_1, phi_2, phi_3 with phi_j(z) = sum_k z^k / (k+j)!.
std::array<Complex, 3> phi_functions(Complex z);

/// Streaming product quadrature for D(t) = int_0^t exp((t-s)L) N(s) ds on a
/// uniform grid of spacing h: N is interpolated by a polynomial in s and the
/// exponential weight is integrated exactly.
class DuhamelQuadrature {
 public:
  DuhamelQuadrature(const std::vector<Complex>& rates, double h);

  double h() const { return h_; }
  /// d <- e^{hL} d + integral over one interval with N linear between n0 and n1.
  void advance_linear(SpectralField& d, const SpectralField& n0, const SpectralField& n1) const;
  /// Quadratic through (t_{j-1}, t_j, t_{j+1}), integrated over [t_j, t_{j+1}].
  void advance_centered(SpectralField& d, const SpectralField& nm1, const SpectralField& n0,
                        const SpectralField& n1) const;
  /// Quadratic through (t_0, t_1, t_2), integrated over [t_0, t_1].
  void advance_forward(SpectralField& d, const SpectralField& n0, const SpectralField& n1,
                       const SpectralField& n2) const;

 private:
  double h_;
  std::vector<Complex> e_;
  std::vector<Complex> phi1_;
  std::vector<Complex> phi2_;
  std::vector<Complex> phi3_;
};

/// Symbol -nu |k|^2 of the heat operator on `grid`.
std::vector<Complex> heat_rates(const GridSpec& grid, double nu);

}  // namespace pwlab
