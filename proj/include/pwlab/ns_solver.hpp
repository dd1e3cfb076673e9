#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "pwlab/exp_integrator.hpp"
#include "pwlab/operators.hpp"

namespace pwlab::ns {

enum class Scheme { integrating_factor_rk4 };

struct SolverConfig {
  double nu = 1.0;
  double dt = 1e-3;
  double T = 1.0;
  Scheme scheme = Scheme::integrating_factor_rk4;
  int snapshot_stride = 1;
  double cfl = 0.5;
  /// false: pure (projected) heat flow, used for linear reference runs.
  bool nonlinear = true;
  /// false: record diagnostics only (large grids).
  bool keep_states = true;
  /// Record the RK4 stage inputs of every step (background runs for perturbations).
  bool dense_output = false;
  std::vector<double> diag_p{3.0, 6.0, kInf};
  double diag_s = 1.0;

  /// Number of steps; throws when T is not an integer multiple of dt.
  std::size_t steps() const;
  void validate() const;
};

struct DiagnosticsRow {
  double t = 0.0;
  std::vector<double> lp;  // one entry per SolverConfig::diag_p
  double hs = 0.0;
  double div_resid = 0.0;
  double energy = 0.0;   // 1/2 ||u||_2^2
  double m_bound = 0.0;  // ||u||_inf + ||grad u||_inf
};

DiagnosticsRow compute_diagnostics(const SpectralField& u, double t, const SolverConfig& cfg);

struct Trajectory {
  double dt = 0.0;
  int stride = 1;
  std::vector<double> lp_exponents;
  std::vector<double> times;
  std::vector<SpectralField> states;  // empty for diagnostics-only runs
  std::vector<DiagnosticsRow> diagnostics;
  std::vector<StageSet> stages;  // dense output: one entry per step

  bool has_states() const { return !states.empty(); }
  const SpectralField& final_state() const { return states.back(); }
};

/// Raised for CFL violations and non-finite states; carries the failing time.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

/// Throws std::invalid_argument unless u is divergence-free (1e-10) with zero mean.
void validate_initial(const SpectralField& u);
/// Projects, removes the mean and zeroes Nyquist planes.
SpectralField prepare_initial(SpectralField u);

/// Reusable integrating-factor RK4 stepper for u_t = nu Delta u - P div(u (x) u).
class Stepper {
 public:
  Stepper(const GridSpec& grid, const SolverConfig& cfg);
  /// Advances u from time t by cfg.dt; throws SolverError on CFL violation or non-finite output.
  void advance(SpectralField& u, double t, StageSet* record = nullptr) const;

 private:
  GridSpec grid_;
  SolverConfig cfg_;
  IfRk4 rk_;
};

/// One integrating-factor RK4 step of u_t = nu Delta u - P div(u (x) u).
SpectralField step(const SpectralField& u, const SolverConfig& cfg);
Trajectory evolve(const SpectralField& u0, const SolverConfig& cfg);

/// P((v.grad)v + (phi.grad)v + (v.grad)phi), via P div((v+phi)(x)(v+phi) - phi(x)phi).
SpectralField perturbation_rhs(const SpectralField& v, const SpectralField& phi);

/// Source of the background flow phi for perturbation stepping and Picard iteration.
///
/// Stage requests arrive in step order; state requests may be random access.
class BackgroundFlow {
 public:
  virtual ~BackgroundFlow() = default;
  virtual const GridSpec& grid() const = 0;
  virtual double dt() const = 0;
  virtual std::size_t steps() const = 0;
  /// Physical-space background at RK4 stage `stage` of step `n`.
  virtual const PhysicalField& stage(std::size_t n, int stage) = 0;
  /// Background at grid time n*dt, spectral.
  virtual SpectralField state(std::size_t n) = 0;
};

/// Background replaying a dense 3D (or 2D) trajectory produced with dense_output.
class DenseBackground final : public BackgroundFlow {
 public:
  explicit DenseBackground(const Trajectory& traj);
  const GridSpec& grid() const override { return grid_; }
  double dt() const override { return traj_.dt; }
  std::size_t steps() const override { return traj_.stages.size(); }
  const PhysicalField& stage(std::size_t n, int stage) override;
  SpectralField state(std::size_t n) override;

 private:
  const Trajectory& traj_;
  GridSpec grid_;
  std::size_t cached_step_ = static_cast<std::size_t>(-1);
  int cached_stage_ = -1;
  PhysicalField cache_;
};

/// Called after each recorded sample; returning false stops the run early.
using SampleHook = std::function<bool(const DiagnosticsRow&)>;

/// Solves v_t = nu Delta v - perturbation_rhs(v, phi) with phi from `background`,
/// stage-matched so that evolve(phi0 + v0) = evolve(phi0) + v to rounding.
Trajectory evolve_perturbation(const SpectralField& v0, BackgroundFlow& background, const SolverConfig& cfg,
                               const SampleHook& hook = {});
Trajectory evolve_perturbation(const SpectralField& v0, const Trajectory& phi_traj, const SolverConfig& cfg);

/// CSV with columns t, lp_p3, lp_p6, lp_pinf, hs, energy, div_resid, M_bound.
void write_diagnostics_csv(std::ostream& out, const Trajectory& traj);

}  // namespace pwlab::ns
