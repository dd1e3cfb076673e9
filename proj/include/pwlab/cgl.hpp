#pragma once

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "pwlab/exp_integrator.hpp"
#include "pwlab/experiments.hpp"
#include "pwlab/planewave.hpp"

namespace pwlab::cgl {

/// u_t = (eps + i) Delta u + (i - k) |u|^2 u on a periodic grid.
struct CGLConfig {
  double eps = 1.0;
  double k = 1.0;
  double dt = 1e-3;
  double T = 1.0;
  int snapshot_stride = 1;
  /// dt sqrt(1 + k^2) max|u|^2 <= cfl, checked at the start of every step.
  double cfl = 0.5;
  bool nonlinear = true;
  bool keep_states = true;
  std::vector<double> diag_p{2.0, 4.0, std::numeric_limits<double>::infinity()};
  std::size_t steps() const;
  void validate() const;
};

/// Multiplies each mode by exp(-(eps + i)|k|^2 t).
SpectralField cgl_semigroup(const SpectralField& f, double t, const CGLConfig& cfg);
std::vector<Complex> cgl_rates(const GridSpec& grid, double eps);

/// (i - k) |u|^2 u, dealiased; reports max|u| through `umax` when non-null.
SpectralField cgl_nonlinearity(const SpectralField& u, double k, double* umax = nullptr);

struct CglDiagnostics {
  double t = 0.0;
  std::vector<double> lp;
  double energy = 0.0;   // 1/2 ||u||_2^2
  double grad_sq = 0.0;  // ||grad u||_2^2
  double l4_4 = 0.0;     // ||u||_4^4 by grid quadrature
};

CglDiagnostics cgl_diagnostics(const SpectralField& u, double t, const CGLConfig& cfg);

struct CglTrajectory {
  double dt = 0.0;
  int stride = 1;
  std::vector<double> lp_exponents;
  std::vector<double> times;
  std::vector<SpectralField> states;
  std::vector<CglDiagnostics> diagnostics;
};

class CglStepper {
 public:
  CglStepper(const GridSpec& grid, const CGLConfig& cfg);
  /// Throws ns::SolverError on a CFL-type violation or non-finite output.
  void advance(SpectralField& u, double t, StageSet* record = nullptr) const;

 private:
  CGLConfig cfg_;
  IfRk4 rk_;
};

/// Requires a single-component complex field.
void validate_cgl_field(const SpectralField& f);
SpectralField cgl_step(const SpectralField& u, const CGLConfig& cfg);
CglTrajectory cgl_evolve(const SpectralField& u0, const CGLConfig& cfg);

/// CSV columns t, lp_p2, lp_p4, lp_pinf, energy, grad_sq, l4_4.
void write_cgl_csv(std::ostream& out, const CglTrajectory& traj);

struct EnergyIdentityReport {
  double max_defect = 0.0;
  /// Per interior sample: d/dt (1/2||u||^2) by seven-point centered differences vs the right-hand side.
  std::vector<double> times;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> defect;
  std::string note;
};

/// Compares the discrete derivative of 1/2||u||_2^2 with -eps ||grad u||_2^2 - k ||u||_4^4
/// (squared gradient norm). Needs stride-1 samples; the defect is relative to
/// max(|rhs|, 1e-300) and reported as 0 when both sides vanish.
EnergyIdentityReport cgl_energy_identity_check(const CglTrajectory& traj, const CGLConfig& cfg);

/// Scalar plane-wave embedding f(w, z) -> u(x, y, z), w = (x - c y)/sqrt(1 + c^2).
SpectralField cgl_embed_planewave(const SpectralField& f2d, const planewave::PlaneWaveLattice& lattice);
SpectralField cgl_embed_planewave(const SpectralField& f2d, Rational c, const GridSpec& grid3);
SpectralField cgl_extract_planewave(const SpectralField& u3d, const planewave::PlaneWaveLattice& lattice);

/// max over samples of ||evolve3D(E f0) - E evolve2D(f0)||_2 / ||E evolve2D(f0)||_2.
double cgl_commutation_check(const SpectralField& f0, const CGLConfig& cfg,
                             const planewave::PlaneWaveLattice& lattice);

struct CglStabilityConfig {
  SpectralField prof0;  // 2D complex profile
  Rational c;
  GridSpec grid3;
  PerturbationSpec v0_spec;
  double eps_v = 0.05;  // ||v0||_3
  double delta = 0.05;
  std::vector<double> p_set{3.0, 6.0, std::numeric_limits<double>::infinity()};
  double T = 1.0;
  CGLConfig solver;
  double t_a = 0.0;
  double t_b = 0.0;
  double t_delta_max = 50.0;
  double growth_abort = 10.0;
  void validate() const;
};

struct ProfileEnvelope {
  double p = 0.0;
  double sup = 0.0;  // sup_t t^{1/2 - 1/p} ||f(t)||_p over the profile run
  double late_sup = 0.0;  // the same over the second half of the run
  bool bounded = false;   // finite and late_sup <= sup over the first half
};

struct CglStabilityReport {
  double t_delta = 0.0;
  double profile_l2 = 0.0;
  double v0_l3 = 0.0;
  experiments::DecayWindow window;
  bool aborted = false;
  std::string note;
  std::vector<double> times;              // since injection
  std::vector<std::vector<double>> v_lp;  // per p_set entry
  std::vector<experiments::DecayFit> fits;
  std::vector<experiments::EnvelopeCheck> envelopes;
  std::vector<bool> accepted;
  std::vector<ProfileEnvelope> profile_envelopes;  // p = 2, 4, inf
  bool passed() const;
};

/// Evolves the profile until ||f||_2 < delta, injects the rescaled scalar
/// perturbation, then steps v = u - E f with the profile stage-matched.
CglStabilityReport cgl_stability_run(const CglStabilityConfig& cfg);

}  // namespace pwlab::cgl
