#include "pwlab/cgl.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "pwlab/spectral_context.hpp"

namespace pwlab::cgl {

namespace {

std::string format_time(double t) {
  std::ostringstream os;
  os << std::setprecision(17) << t;
  return os.str();
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

bool all_finite(const SpectralField& f) {
  for (const Complex& z : f.coeffs()) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

void check_cfl(double umax, double t, const CGLConfig& cfg) {
  const double rate = std::sqrt(1.0 + cfg.k * cfg.k) * umax * umax;
  if (cfg.dt * rate > cfg.cfl) {
    throw ns::SolverError("CFL-type violation at t=" + format_time(t) + ": dt=" + format_time(cfg.dt) +
                              " with max|u|^2=" + format_time(umax * umax),
                          t);
  }
}

std::string lp_column(double p) {
  if (std::isinf(p)) return "lp_pinf";
  std::ostringstream os;
  os << "lp_p" << p;
  return os.str();
}

// (i - k) (|a + b|^2 (a + b) - |a|^2 a) in physical space, dealiased; `a` may be null.
SpectralField cubic_difference(const ComplexPhysicalField* a, const SpectralField& b, double k, double* umax) {
  ComplexPhysicalField pb = to_physical_complex(b);
  const Complex coef(-k, 1.0);
  double mx = 0.0;
  auto vals = pb.component(0);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const Complex base = a ? a->component(0)[i] : Complex{};
    const Complex u = base + vals[i];
    mx = std::max(mx, std::abs(u));
    vals[i] = coef * (std::norm(u) * u - std::norm(base) * base);
  }
  if (umax) *umax = mx;
  SpectralField out = to_spectral(pb);
  dealias(out);
  return out;
}

bool sample_due(std::size_t n, std::size_t steps, int stride) {
  return n % static_cast<std::size_t>(stride) == 0 || n == steps;
}

double min_period(const GridSpec& g) { return *std::min_element(g.periods.begin(), g.periods.end()); }

}  // namespace

std::size_t CGLConfig::steps() const {
  ns::SolverConfig c;
  c.dt = dt;
  c.T = T;
  return c.steps();
}

void CGLConfig::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("cgl config: eps must be positive");
  if (!(k > 0.0)) throw std::invalid_argument("cgl config: k must be positive");
  if (snapshot_stride < 1) throw std::invalid_argument("cgl config: snapshot_stride must be >= 1");
  if (!(cfl > 0.0)) throw std::invalid_argument("cgl config: cfl must be positive");
  for (double p : diag_p) {
    if (!(p >= 1.0)) throw std::invalid_argument("cgl config: diagnostic exponents must be >= 1");
  }
  (void)steps();
}

std::vector<Complex> cgl_rates(const GridSpec& grid, double eps) {
  const auto& k2 = spectral::Context::get(grid).k2();
  std::vector<Complex> r(k2.size());
  for (std::size_t m = 0; m < k2.size(); ++m) r[m] = -Complex(eps, 1.0) * k2[m];
  return r;
}

SpectralField cgl_semigroup(const SpectralField& f, double t, const CGLConfig& cfg) {
  if (t < 0.0) throw std::invalid_argument("cgl_semigroup: negative time");
  if (!(cfg.eps > 0.0)) throw std::invalid_argument("cgl_semigroup: eps must be positive");
  SpectralField out = f;
  if (t == 0.0) return out;
  const auto rates = cgl_rates(f.grid(), cfg.eps);
  for (int c = 0; c < out.components(); ++c) {
    auto oc = out.component(c);
    for (std::size_t m = 0; m < out.modes(); ++m) oc[m] *= std::exp(rates[m] * t);
  }
  return out;
}

SpectralField cgl_nonlinearity(const SpectralField& u, double k, double* umax) {
  return cubic_difference(nullptr, u, k, umax);
}

void validate_cgl_field(const SpectralField& f) {
  if (f.components() != 1 || f.is_real()) {
    throw std::invalid_argument("cgl: expected a single-component complex field");
  }
}

CglDiagnostics cgl_diagnostics(const SpectralField& u, double t, const CGLConfig& cfg) {
  CglDiagnostics d;
  d.t = t;
  const ComplexPhysicalField phys = to_physical_complex(u);
  for (double p : cfg.diag_p) d.lp.push_back(lp_norm(phys, p));
  const double l2 = l2_norm(u);
  d.energy = 0.5 * l2 * l2;
  const auto& k2 = spectral::Context::get(u.grid()).k2();
  double g = 0.0;
  for (std::size_t m = 0; m < u.modes(); ++m) g += k2[m] * std::norm(u.at(0, m));
  d.grad_sq = g * u.grid().volume();
  double q = 0.0;
  for (const Complex& z : phys.component(0)) q += std::norm(z) * std::norm(z);
  d.l4_4 = q * u.grid().cell_volume();
  return d;
}

CglStepper::CglStepper(const GridSpec& grid, const CGLConfig& cfg) : cfg_(cfg), rk_(cgl_rates(grid, cfg.eps), cfg.dt) {}

void CglStepper::advance(SpectralField& u, double t, StageSet* record) const {
  rk_.step(
      u,
      [&](const SpectralField& s, int stage, SpectralField& out) {
        if (!cfg_.nonlinear) {
          out.set_zero();
          return;
        }
        double umax = 0.0;
        out = cgl_nonlinearity(s, cfg_.k, &umax);
        if (stage == 0) check_cfl(umax, t, cfg_);
      },
      record);
  if (!all_finite(u)) throw ns::SolverError("non-finite state at t=" + format_time(t + cfg_.dt), t + cfg_.dt);
}

SpectralField cgl_step(const SpectralField& u, const CGLConfig& cfg) {
  cfg.validate();
  validate_cgl_field(u);
  SpectralField out = u;
  CglStepper(u.grid(), cfg).advance(out, 0.0);
  return out;
}

CglTrajectory cgl_evolve(const SpectralField& u0, const CGLConfig& cfg) {
  cfg.validate();
  validate_cgl_field(u0);
  const std::size_t steps = cfg.steps();
  const CglStepper stepper(u0.grid(), cfg);
  CglTrajectory traj;
  traj.dt = cfg.dt;
  traj.stride = cfg.snapshot_stride;
  traj.lp_exponents = cfg.diag_p;
  auto record = [&](const SpectralField& u, double t) {
    traj.times.push_back(t);
    traj.diagnostics.push_back(cgl_diagnostics(u, t, cfg));
    if (cfg.keep_states) traj.states.push_back(u);
  };
  SpectralField u = u0;
  record(u, 0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    stepper.advance(u, static_cast<double>(n - 1) * cfg.dt);
    if (sample_due(n, steps, cfg.snapshot_stride)) record(u, static_cast<double>(n) * cfg.dt);
  }
  return traj;
}

void write_cgl_csv(std::ostream& out, const CglTrajectory& traj) {
  out << "t";
  for (double p : traj.lp_exponents) out << ',' << lp_column(p);
  out << ",energy,grad_sq,l4_4\n";
  const auto old = out.precision(17);
  for (const auto& row : traj.diagnostics) {
    out << row.t;
    for (double v : row.lp) out << ',' << v;
    out << ',' << row.energy << ',' << row.grad_sq << ',' << row.l4_4 << '\n';
  }
  out.precision(old);
}

EnergyIdentityReport cgl_energy_identity_check(const CglTrajectory& traj, const CGLConfig& cfg) {
  EnergyIdentityReport rep;
  rep.note = "energy identity uses the squared gradient norm eps ||grad u||_2^2 (the unsquared form is dimensionally inconsistent)";
  const auto& d = traj.diagnostics;
  for (std::size_t i = 1; i < traj.times.size(); ++i) {
    if (std::abs(traj.times[i] - traj.times[i - 1] - traj.dt) > 1e-9 * traj.dt) {
      throw std::invalid_argument("cgl_energy_identity_check: needs samples at every step");
    }
  }
  if (d.size() < 7) throw std::invalid_argument("cgl_energy_identity_check: needs at least 7 samples");
  const double h = traj.dt;
  // sixth-order centered first derivative
  constexpr double w[3] = {45.0, -9.0, 1.0};
  for (std::size_t i = 3; i + 3 < d.size(); ++i) {
    double lhs = 0.0;
    for (std::size_t j = 0; j < 3; ++j) lhs += w[j] * (d[i + j + 1].energy - d[i - j - 1].energy);
    lhs /= 60.0 * h;
    const double rhs = -cfg.eps * d[i].grad_sq - (cfg.nonlinear ? cfg.k * d[i].l4_4 : 0.0);
    const double diff = std::abs(lhs - rhs);
    const double defect = diff == 0.0 ? 0.0 : diff / std::max(std::abs(rhs), 1e-300);
    rep.times.push_back(traj.times[i]);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.defect.push_back(defect);
    rep.max_defect = std::max(rep.max_defect, defect);
  }
  return rep;
}

SpectralField cgl_embed_planewave(const SpectralField& f2d, const planewave::PlaneWaveLattice& lattice) {
  validate_cgl_field(f2d);
  return planewave::embed_scalar(f2d, lattice);
}

SpectralField cgl_embed_planewave(const SpectralField& f2d, Rational c, const GridSpec& grid3) {
  return cgl_embed_planewave(f2d, planewave::PlaneWaveLattice::make(c, f2d.grid(), grid3));
}

SpectralField cgl_extract_planewave(const SpectralField& u3d, const planewave::PlaneWaveLattice& lattice) {
  validate_cgl_field(u3d);
  return planewave::extract_scalar(u3d, lattice);
}

double cgl_commutation_check(const SpectralField& f0, const CGLConfig& cfg,
                             const planewave::PlaneWaveLattice& lattice) {
  cfg.validate();
  validate_cgl_field(f0);
  const std::size_t steps = cfg.steps();
  const CglStepper s2(lattice.grid2, cfg);
  const CglStepper s3(lattice.grid3, cfg);
  SpectralField f = f0;
  SpectralField u = cgl_embed_planewave(f0, lattice);
  double worst = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t = static_cast<double>(n - 1) * cfg.dt;
    s2.advance(f, t);
    s3.advance(u, t);
    if (!sample_due(n, steps, cfg.snapshot_stride)) continue;
    const SpectralField e = cgl_embed_planewave(f, lattice);
    const double ref = l2_norm(e);
    const double diff = l2_norm(u - e);
    worst = std::max(worst, ref > 0.0 ? diff / ref : diff);
  }
  return worst;
}

// ---- stability ---------------------------------------------------------------------

void CglStabilityConfig::validate() const {
  validate_cgl_field(prof0);
  if (prof0.grid().dim != 2) throw std::invalid_argument("cgl stability: profile must be two-dimensional");
  if (grid3.dim != 3) throw std::invalid_argument("cgl stability: grid3 must be three-dimensional");
  if (!(eps_v > 0.0)) throw std::invalid_argument("cgl stability: eps_v must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("cgl stability: delta must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("cgl stability: T must be positive");
  if (t_a < 0.0 || (t_a > 0.0 && !(t_b > t_a))) throw std::invalid_argument("cgl stability: invalid fit window");
  if (std::find(p_set.begin(), p_set.end(), 3.0) == p_set.end()) {
    throw std::invalid_argument("cgl stability: p_set must contain 3");
  }
  for (double p : p_set) {
    if (!(p >= 3.0)) throw std::invalid_argument("cgl stability: exponents must be >= 3");
  }
  if (2.0 * v0_spec.radius > min_period(grid3) / 8.0) {
    throw std::invalid_argument("cgl stability: perturbation support diameter exceeds box/8");
  }
  if (!(growth_abort > 1.0)) throw std::invalid_argument("cgl stability: growth_abort must exceed 1");
}

bool CglStabilityReport::passed() const {
  if (aborted) return false;
  const bool fits_ok = std::all_of(accepted.begin(), accepted.end(), [](bool b) { return b; });
  const bool prof_ok = std::all_of(profile_envelopes.begin(), profile_envelopes.end(),
                                   [](const ProfileEnvelope& e) { return e.bounded; });
  return fits_ok && prof_ok;
}

CglStabilityReport cgl_stability_run(const CglStabilityConfig& cfg) {
  cfg.validate();
  CGLConfig solver = cfg.solver;
  solver.T = cfg.T;
  solver.validate();
  const std::size_t steps = solver.steps();
  const auto lattice = planewave::PlaneWaveLattice::make(cfg.c, cfg.prof0.grid(), cfg.grid3);

  CglStabilityReport rep;
  const std::vector<double> prof_p{2.0, 4.0, kInf};
  std::vector<double> prof_t;
  std::vector<std::vector<double>> prof_env(prof_p.size());
  auto record_profile = [&](const SpectralField& f, double t) {
    const ComplexPhysicalField phys = to_physical_complex(f);
    prof_t.push_back(t);
    for (std::size_t j = 0; j < prof_p.size(); ++j) {
      const double e = std::isinf(prof_p[j]) ? 0.5 : 0.5 - 1.0 / prof_p[j];
      prof_env[j].push_back(std::pow(t, e) * lp_norm(phys, prof_p[j]));
    }
  };

  // profile alone until ||f||_2 < delta
  const CglStepper s2(lattice.grid2, solver);
  SpectralField f = cfg.prof0;
  double t = 0.0;
  std::size_t n0 = 0;
  record_profile(f, 0.0);
  while (l2_norm(f) >= cfg.delta) {
    if (t >= cfg.t_delta_max) {
      throw std::runtime_error("cgl profile: ||f||_2 = " + fmt(l2_norm(f)) + " still >= delta at t = " + fmt(t));
    }
    s2.advance(f, t);
    ++n0;
    t = static_cast<double>(n0) * solver.dt;
    record_profile(f, t);
  }
  rep.t_delta = t;
  rep.profile_l2 = l2_norm(f);

  PerturbationSpec spec = cfg.v0_spec;
  SpectralField v = localized_scalar(cfg.grid3, spec, false);
  const double n3 = lp_norm(v, 3.0);
  if (n3 > 0.0) {
    v *= cfg.eps_v / n3;
  } else {
    v.set_zero();
  }
  rep.v0_l3 = lp_norm(v, 3.0);
  rep.v_lp.assign(cfg.p_set.size(), {});
  const auto i3 = static_cast<std::size_t>(std::find(cfg.p_set.begin(), cfg.p_set.end(), 3.0) - cfg.p_set.begin());
  auto record_v = [&](double tv) {
    const ComplexPhysicalField phys = to_physical_complex(v);
    rep.times.push_back(tv);
    for (std::size_t j = 0; j < cfg.p_set.size(); ++j) rep.v_lp[j].push_back(lp_norm(phys, cfg.p_set[j]));
  };
  record_v(0.0);

  // v_t = (eps + i) Delta v + (i - k)(|phi + v|^2 (phi + v) - |phi|^2 phi), phi stage-matched
  IfRk4 rk3(cgl_rates(cfg.grid3, solver.eps), solver.dt);
  StageSet stages;
  ComplexPhysicalField phi;
  double t_step = 0.0;
  try {
    for (std::size_t n = 1; n <= steps; ++n) {
      t_step = static_cast<double>(n - 1) * solver.dt;
      s2.advance(f, rep.t_delta + t_step, &stages);
      rk3.step(v, [&](const SpectralField& s, int stage, SpectralField& out) {
        phi = to_physical_complex(cgl_embed_planewave(stages.u[static_cast<std::size_t>(stage)], lattice));
        if (!solver.nonlinear) {
          out.set_zero();
          return;
        }
        double umax = 0.0;
        out = cubic_difference(&phi, s, solver.k, &umax);
        if (stage == 0) check_cfl(umax, t_step, solver);
      });
      if (!all_finite(v)) throw ns::SolverError("non-finite perturbation at t=" + format_time(t_step + solver.dt), t_step);
      const double tv = static_cast<double>(n) * solver.dt;
      record_profile(f, rep.t_delta + tv);
      if (!sample_due(n, steps, solver.snapshot_stride)) continue;
      record_v(tv);
      if (rep.v0_l3 > 0.0 && rep.v_lp[i3].back() > cfg.growth_abort * rep.v0_l3) {
        rep.aborted = true;
        rep.note = "smallness violated: ||v||_3 = " + fmt(rep.v_lp[i3].back()) + " at t = " + fmt(tv) +
                   " exceeds " + fmt(cfg.growth_abort) + " x ||v0||_3";
        break;
      }
    }
  } catch (const ns::SolverError& e) {
    rep.aborted = true;
    rep.note = std::string("smallness violated: solver abort (") + e.what() + ")";
  }

  for (std::size_t j = 0; j < prof_p.size(); ++j) {
    ProfileEnvelope pe;
    pe.p = prof_p[j];
    const double half = 0.5 * prof_t.back();
    double early = 0.0;
    bool finite = true;
    for (std::size_t i = 0; i < prof_t.size(); ++i) {
      const double e = prof_env[j][i];
      finite = finite && std::isfinite(e);
      pe.sup = std::max(pe.sup, e);
      if (prof_t[i] <= half) {
        early = std::max(early, e);
      } else {
        pe.late_sup = std::max(pe.late_sup, e);
      }
    }
    pe.bounded = finite && pe.late_sup <= early;
    rep.profile_envelopes.push_back(pe);
  }

  rep.window = experiments::decay_window(cfg.grid3, cfg.v0_spec, cfg.T, cfg.t_a, cfg.t_b);
  if (rep.v0_l3 == 0.0) {
    if (rep.note.empty()) rep.note = "zero perturbation: fits skipped";
    return rep;
  }
  if (rep.aborted) return rep;
  experiments::DecayJudgement jd = experiments::judge_decay(rep.times, rep.v_lp, cfg.p_set, rep.window, cfg.growth_abort);
  rep.fits = std::move(jd.fits);
  rep.envelopes = std::move(jd.envelopes);
  rep.accepted = std::move(jd.accepted);
  rep.note = jd.note;
  return rep;
}

}  // namespace pwlab::cgl
