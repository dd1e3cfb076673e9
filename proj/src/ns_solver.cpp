#include "pwlab/ns_solver.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pwlab/spectral_context.hpp"

namespace pwlab::ns {

namespace {

constexpr double kDivTolerance = 1e-10;

bool all_finite(const SpectralField& f) {
  for (const Complex& z : f.coeffs()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

std::string format_time(double t) {
  std::ostringstream os;
  os << std::setprecision(17) << t;
  return os.str();
}

void check_cfl(double umax, double t, const GridSpec& grid, const SolverConfig& cfg) {
  if (umax <= 0.0) return;
  const double bound = cfg.cfl * grid.min_spacing() / umax;
  if (cfg.dt > bound) {
    throw SolverError("CFL violation at t=" + format_time(t) + ": dt=" + format_time(cfg.dt) +
                          " exceeds " + format_time(bound) + " (max|u|=" + format_time(umax) + ")",
                      t);
  }
}

void check_finite(const SpectralField& u, double t) {
  if (!all_finite(u)) throw SolverError("non-finite state at t=" + format_time(t), t);
}

std::string lp_column(double p) {
  if (std::isinf(p)) return "lp_pinf";
  std::ostringstream os;
  os << "lp_p" << p;
  return os.str();
}

void record_sample(Trajectory& traj, const SpectralField& u, double t, const SolverConfig& cfg) {
  traj.times.push_back(t);
  traj.diagnostics.push_back(compute_diagnostics(u, t, cfg));
  if (cfg.keep_states) traj.states.push_back(u);
}

Trajectory make_trajectory(const SolverConfig& cfg) {
  Trajectory traj;
  traj.dt = cfg.dt;
  traj.stride = cfg.snapshot_stride;
  traj.lp_exponents = cfg.diag_p;
  return traj;
}

bool sample_due(std::size_t n, std::size_t steps, int stride) {
  return n % static_cast<std::size_t>(stride) == 0 || n == steps;
}

}  // namespace

std::size_t SolverConfig::steps() const {
  if (!(dt > 0.0) || !(T > 0.0)) throw std::invalid_argument("solver config: dt and T must be positive");
  const double r = T / dt;
  const double n = std::round(r);
  if (n < 1.0 || std::abs(r - n) > 1e-9 * std::max(1.0, r)) {
    throw std::invalid_argument("solver config: T must be an integer multiple of dt");
  }
  return static_cast<std::size_t>(n);
}

void SolverConfig::validate() const {
  if (!(nu > 0.0)) throw std::invalid_argument("solver config: nu must be positive");
  if (snapshot_stride < 1) throw std::invalid_argument("solver config: snapshot_stride must be >= 1");
  if (!(cfl > 0.0)) throw std::invalid_argument("solver config: cfl must be positive");
  if (diag_s < 0.0) throw std::invalid_argument("solver config: diag_s must be nonnegative");
  for (double p : diag_p) {
    if (!(p >= 1.0)) throw std::invalid_argument("solver config: diagnostic exponents must be >= 1");
  }
  (void)steps();
}

DiagnosticsRow compute_diagnostics(const SpectralField& u, double t, const SolverConfig& cfg) {
  DiagnosticsRow row;
  row.t = t;
  const PhysicalField phys = to_physical(u);
  for (double p : cfg.diag_p) row.lp.push_back(lp_norm(phys, p));
  row.hs = hs_norm(u, cfg.diag_s);
  row.div_resid = u.components() == u.grid().dim ? divergence_residual(u) : 0.0;
  const double l2 = l2_norm(u);
  row.energy = 0.5 * l2 * l2;

  // ||grad u||_inf as the pointwise Frobenius norm of the gradient tensor.
  const PhysicalField grad = to_physical(gradient_tensor(u));
  const std::size_t n = u.grid().size();
  double gmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (int c = 0; c < grad.components; ++c) s += grad.component(c)[i] * grad.component(c)[i];
    gmax = std::max(gmax, s);
  }
  row.m_bound = max_abs(phys) + std::sqrt(gmax);
  return row;
}

void validate_initial(const SpectralField& u) {
  if (u.components() != u.grid().dim) throw std::invalid_argument("initial data: expected dim components");
  if (!u.is_real()) throw std::invalid_argument("initial data: expected a real field");
  const double r = divergence_residual(u);
  if (r > kDivTolerance) {
    throw std::invalid_argument("initial data: not divergence-free (residual " + format_time(r) + ")");
  }
  const double scale = std::max(1.0, l2_norm(u));
  for (int c = 0; c < u.components(); ++c) {
    if (std::abs(u.at(c, 0)) > 1e-12 * scale) throw std::invalid_argument("initial data: nonzero mean");
  }
}

SpectralField prepare_initial(SpectralField u) {
  u = leray_project(u);
  remove_mean(u);
  zero_nyquist(u);
  return u;
}

Stepper::Stepper(const GridSpec& grid, const SolverConfig& cfg)
    : grid_(grid), cfg_(cfg), rk_(heat_rates(grid, cfg.nu), cfg.dt) {}

void Stepper::advance(SpectralField& u, double t, StageSet* record) const {
  rk_.step(
      u,
      [&](const SpectralField& s, int stage, SpectralField& k) {
        if (!cfg_.nonlinear) {
          k.set_zero();
          return;
        }
        double umax = 0.0;
        k = self_nonlinearity(s, &umax);
        k *= -1.0;
        if (stage == 0) check_cfl(umax, t, grid_, cfg_);
      },
      record);
  check_finite(u, t + cfg_.dt);
}

SpectralField step(const SpectralField& u, const SolverConfig& cfg) {
  validate_initial(u);
  SpectralField out = u;
  Stepper(u.grid(), cfg).advance(out, 0.0);
  return out;
}

Trajectory evolve(const SpectralField& u0, const SolverConfig& cfg) {
  cfg.validate();
  validate_initial(u0);
  const std::size_t steps = cfg.steps();
  const Stepper stepper(u0.grid(), cfg);

  Trajectory traj = make_trajectory(cfg);
  SpectralField u = u0;
  record_sample(traj, u, 0.0, cfg);
  if (cfg.dense_output) traj.stages.reserve(steps);

  for (std::size_t n = 1; n <= steps; ++n) {
    StageSet* rec = nullptr;
    if (cfg.dense_output) rec = &traj.stages.emplace_back();
    stepper.advance(u, static_cast<double>(n - 1) * cfg.dt, rec);
    if (sample_due(n, steps, cfg.snapshot_stride)) record_sample(traj, u, static_cast<double>(n) * cfg.dt, cfg);
  }
  return traj;
}

SpectralField perturbation_rhs(const SpectralField& v, const SpectralField& phi) {
  return perturbation_nonlinearity(v, phi);
}

DenseBackground::DenseBackground(const Trajectory& traj) : traj_(traj) {
  if (traj.stages.empty()) throw std::invalid_argument("dense background: trajectory has no dense output");
  grid_ = traj.stages.front().u[0].grid();
}

const PhysicalField& DenseBackground::stage(std::size_t n, int stage) {
  if (n >= traj_.stages.size() || stage < 0 || stage > 3) {
    throw std::out_of_range("dense background: stage request beyond the stored horizon");
  }
  if (n != cached_step_ || stage != cached_stage_) {
    cache_ = to_physical(traj_.stages[n].u[static_cast<std::size_t>(stage)]);
    cached_step_ = n;
    cached_stage_ = stage;
  }
  return cache_;
}

SpectralField DenseBackground::state(std::size_t n) {
  if (n < traj_.stages.size()) return traj_.stages[n].u[0];
  if (n == traj_.stages.size() && traj_.has_states()) return traj_.final_state();
  throw std::out_of_range("dense background: state request beyond the stored horizon");
}

Trajectory evolve_perturbation(const SpectralField& v0, BackgroundFlow& background, const SolverConfig& cfg,
                               const SampleHook& hook) {
  cfg.validate();
  validate_initial(v0);
  const GridSpec& grid = v0.grid();
  if (!(background.grid() == grid)) throw std::invalid_argument("evolve_perturbation: background grid mismatch");
  if (std::abs(background.dt() - cfg.dt) > 1e-14 * cfg.dt) {
    throw std::invalid_argument("evolve_perturbation: background dt differs from solver dt");
  }
  const std::size_t steps = cfg.steps();
  if (background.steps() < steps) {
    throw std::invalid_argument("evolve_perturbation: horizon mismatch (background covers " +
                                std::to_string(background.steps()) + " steps, run needs " +
                                std::to_string(steps) + ")");
  }
  IfRk4 rk(heat_rates(grid, cfg.nu), cfg.dt);

  Trajectory traj = make_trajectory(cfg);
  SpectralField v = v0;
  record_sample(traj, v, 0.0, cfg);
  if (hook && !hook(traj.diagnostics.back())) return traj;
  if (cfg.dense_output) traj.stages.reserve(steps);

  std::size_t current = 0;
  double t = 0.0;
  auto rhs = [&](const SpectralField& s, int stage, SpectralField& k) {
    if (!cfg.nonlinear) {
      k.set_zero();
      return;
    }
    double vmax = 0.0;
    k = perturbation_nonlinearity(s, background.stage(current, stage), &vmax);
    k *= -1.0;
    if (stage == 0) check_cfl(vmax, t, grid, cfg);
  };

  for (std::size_t n = 1; n <= steps; ++n) {
    current = n - 1;
    StageSet* rec = nullptr;
    if (cfg.dense_output) rec = &traj.stages.emplace_back();
    rk.step(v, rhs, rec);
    t = static_cast<double>(n) * cfg.dt;
    check_finite(v, t);
    if (sample_due(n, steps, cfg.snapshot_stride)) {
      record_sample(traj, v, t, cfg);
      if (hook && !hook(traj.diagnostics.back())) break;
    }
  }
  return traj;
}

Trajectory evolve_perturbation(const SpectralField& v0, const Trajectory& phi_traj, const SolverConfig& cfg) {
  DenseBackground bg(phi_traj);
  return evolve_perturbation(v0, bg, cfg);
}

void write_diagnostics_csv(std::ostream& out, const Trajectory& traj) {
  out << "t";
  for (double p : traj.lp_exponents) out << ',' << lp_column(p);
  out << ",hs,energy,div_resid,M_bound\n";
  const auto old = out.precision(17);
  for (const auto& row : traj.diagnostics) {
    out << row.t;
    for (double v : row.lp) out << ',' << v;
    out << ',' << row.hs << ',' << row.energy << ',' << row.div_resid << ',' << row.m_bound << '\n';
  }
  out.precision(old);
}

}  // namespace pwlab::ns
