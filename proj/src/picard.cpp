#include "pwlab/picard.hpp"

#include <cmath>
#include <stdexcept>

#include "pwlab/exp_integrator.hpp"

namespace pwlab::picard {

namespace {

struct WeightedNorms {
  double K = 0.0;
  double K_grad = 0.0;
};

double weight(double t, double L, double gamma) {
  return std::exp(-L * t) * std::pow(t, 0.5 * (1.0 - gamma));
}

double sup_gamma(const PhysicalField& phys, double t, double L, const std::vector<double>& gammas) {
  double best = 0.0;
  for (double g : gammas) {
    if (t == 0.0 && g < 1.0) continue;
    best = std::max(best, weight(t, L, g) * lp_norm(phys, 3.0 / g));
  }
  return best;
}

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw std::invalid_argument("weighted norm: gamma must lie in (0, 1]");
}

// Streams a Duhamel integral over uniformly spaced nodes; `n_at(j)` yields the
// integrand at node j. Quadratic interpolation (forward on the first interval,
// centered afterwards) when at least three nodes exist, linear otherwise.
template <typename NodeFn, typename EmitFn>
void stream_duhamel(const DuhamelQuadrature& quad, std::size_t nodes, const SpectralField& zero, NodeFn&& n_at,
                    EmitFn&& emit) {
  SpectralField d = zero;
  if (nodes < 2) return;
  if (nodes == 2) {
    SpectralField n0 = n_at(0);
    SpectralField n1 = n_at(1);
    quad.advance_linear(d, n0, n1);
    emit(1, d);
    return;
  }
  SpectralField a = n_at(0);
  SpectralField b = n_at(1);
  SpectralField c = n_at(2);
  quad.advance_forward(d, a, b, c);
  emit(1, d);
  for (std::size_t j = 1; j + 1 < nodes; ++j) {
    if (j >= 2) {
      a = std::move(b);
      b = std::move(c);
      c = n_at(j + 1);
    }
    quad.advance_centered(d, a, b, c);
    emit(j + 1, d);
  }
}

}  // namespace

void PicardConfig::validate() const {
  if (!(T_star > 0.0)) throw std::invalid_argument("picard: T_star must be positive");
  if (gammas.empty()) throw std::invalid_argument("picard: gammas must not be empty");
  for (double g : gammas) check_gamma(g);
  if (!(holder_p > 2.0)) throw std::invalid_argument("picard: holder_p must exceed 2");
  if (max_iter < 1) throw std::invalid_argument("picard: max_iter must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("picard: eps must be positive");
  if (node_stride < 1) throw std::invalid_argument("picard: node_stride must be >= 1");
}

double gradient_l3(const SpectralField& v) { return lp_norm(gradient_tensor(v), 3.0); }

double w1inf_norm(const SpectralField& phi) {
  const PhysicalField u = to_physical(phi);
  const PhysicalField g = to_physical(gradient_tensor(phi));
  double gmax = 0.0;
  for (std::size_t i = 0; i < g.grid.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < g.components; ++c) s += g.component(c)[i] * g.component(c)[i];
    gmax = std::max(gmax, s);
  }
  return max_abs(u) + std::sqrt(gmax);
}

double weighted_norm(const ns::Trajectory& traj, double gamma, double L) {
  check_gamma(gamma);
  if (!traj.has_states()) throw std::invalid_argument("weighted norm: trajectory stores no states");
  double best = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t == 0.0 && gamma < 1.0) continue;
    best = std::max(best, weight(t, L, gamma) * lp_norm(traj.states[i], 3.0 / gamma));
  }
  return best;
}

double gradient_weighted_norm(const ns::Trajectory& traj, double L) {
  if (!traj.has_states()) throw std::invalid_argument("weighted norm: trajectory stores no states");
  double best = 0.0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    if (t == 0.0) continue;
    best = std::max(best, std::exp(-L * t) * std::sqrt(t) * gradient_l3(traj.states[i]));
  }
  return best;
}

PicardResult picard_solve(const SpectralField& v0, ns::BackgroundFlow& background, const PicardConfig& pcfg,
                          const ns::SolverConfig& cfg) {
  pcfg.validate();
  cfg.validate();
  ns::validate_initial(v0);
  const GridSpec& grid = v0.grid();
  if (!(background.grid() == grid)) throw std::invalid_argument("picard: background grid mismatch");
  if (std::abs(background.dt() - cfg.dt) > 1e-14 * cfg.dt) {
    throw std::invalid_argument("picard: background dt differs from solver dt");
  }
  ns::SolverConfig horizon = cfg;
  horizon.T = pcfg.T_star;
  const std::size_t steps = horizon.steps();
  if (steps % static_cast<std::size_t>(pcfg.node_stride) != 0) {
    throw std::invalid_argument("picard: node_stride must divide the number of steps");
  }
  if (background.steps() < steps) throw std::invalid_argument("picard: horizon mismatch");
  const std::size_t J = steps / static_cast<std::size_t>(pcfg.node_stride);
  const double h = cfg.dt * pcfg.node_stride;

  // Background at the nodes, physical space, and its W^{1,inf} bound.
  std::vector<PhysicalField> phi(J + 1);
  PicardReport report;
  for (std::size_t j = 0; j <= J; ++j) {
    const SpectralField s = background.state(j * static_cast<std::size_t>(pcfg.node_stride));
    report.M = std::max(report.M, w1inf_norm(s));
    phi[j] = to_physical(s);
  }
  report.L = pcfg.L > 0.0 ? pcfg.L : 4.0 * report.M * (1.0 + pcfg.T_star);
  report.v0_l3 = lp_norm(v0, 3.0);
  report.below_eps = report.v0_l3 <= pcfg.eps;
  const double L = report.L;

  std::vector<double> times(J + 1);
  for (std::size_t j = 0; j <= J; ++j) times[j] = static_cast<double>(j) * h;

  const auto rates = heat_rates(grid, cfg.nu);
  const DuhamelQuadrature quad(rates, h);
  const SpectralField zero(grid, grid.dim, true);

  auto norms_of = [&](const SpectralField& v, double t) {
    WeightedNorms w;
    w.K = sup_gamma(to_physical(v), t, L, pcfg.gammas);
    if (t > 0.0) w.K_grad = std::exp(-L * t) * std::sqrt(t) * gradient_l3(v);
    return w;
  };

  // v_1 = e^{t Delta} v0; W_1 = K_1 since v_0 := 0.
  std::vector<SpectralField> v(J + 1);
  IterationRecord first;
  first.n = 1;
  for (std::size_t j = 0; j <= J; ++j) {
    v[j] = heat_semigroup(v0, times[j], cfg.nu);
    const WeightedNorms w = norms_of(v[j], times[j]);
    first.K = std::max(first.K, w.K);
    first.K_grad = std::max(first.K_grad, w.K_grad);
  }
  first.W = first.K;
  report.iterations.push_back(first);

  const double p = pcfg.holder_p;
  const double pp = p / (p - 1.0);
  const double a = std::pow(pcfg.T_star, (2.0 - pp) / (2.0 * pp)) / std::pow(p * L, 1.0 / p);
  const double b = std::pow(pcfg.T_star, 1.0 / pp) / std::pow(p * L, 1.0 / p);
  const double growth = std::exp(L * pcfg.T_star);
  auto rhs13 = [&](const IterationRecord& r) {
    return first.K + growth * r.K * r.K_grad + a * report.M * r.K_grad + b * report.M * r.K;
  };

  const double W1 = first.W;
  if (W1 == 0.0) {
    report.converged = true;
    report.note = "zero initial perturbation";
  }

  for (int n = 1; n < pcfg.max_iter && !report.converged; ++n) {
    IterationRecord next;
    next.n = n + 1;
    // N_j from the current iterate; v[j] is overwritten with v_{n+1}(t_j) once N_j is taken.
    auto n_at = [&](std::size_t j) { return perturbation_nonlinearity(v[j], phi[j]); };
    {
      const WeightedNorms w0 = norms_of(v[0], 0.0);
      next.K = w0.K;
    }
    bool finite = true;
    stream_duhamel(quad, J + 1, zero, n_at, [&](std::size_t j, const SpectralField& d) {
      SpectralField nv = heat_semigroup(v0, times[j], cfg.nu);
      nv -= d;
      SpectralField diff = nv - v[j];
      const double t = times[j];
      const WeightedNorms w = norms_of(nv, t);
      next.K = std::max(next.K, w.K);
      next.K_grad = std::max(next.K_grad, w.K_grad);
      next.W = std::max(next.W, sup_gamma(to_physical(diff), t, L, pcfg.gammas));
      finite = finite && std::isfinite(w.K) && std::isfinite(w.K_grad);
      v[j] = std::move(nv);
    });

    IterationRecord& prev = report.iterations.back();
    prev.ratio = prev.W > 0.0 ? next.W / prev.W : 0.0;
    prev.recurrence_rhs = rhs13(prev);
    report.fitted_C = std::max(report.fitted_C, next.K / prev.recurrence_rhs);
    report.iterations.push_back(next);

    if (!finite || !std::isfinite(next.W)) {
      report.diverged = true;
      report.note = "non-finite iterate";
      break;
    }
    if (next.W > 1e3 * W1) {
      report.diverged = true;
      report.note = "iterates diverge: W_n grew beyond 1e3 W_1";
      break;
    }
    if (next.W <= pcfg.rel_tol * W1) report.converged = true;
  }
  if (!report.converged && !report.diverged) {
    const auto& it = report.iterations;
    if (it.size() >= 2 && it.back().W > it[it.size() - 2].W) {
      report.diverged = true;
      report.note = "W_n increasing at the last iteration";
    } else {
      report.note = "max_iter reached";
    }
  }
  report.iterations.back().recurrence_rhs = rhs13(report.iterations.back());

  PicardResult result;
  result.report = std::move(report);
  ns::Trajectory& traj = result.trajectory;
  traj.dt = cfg.dt;
  traj.stride = pcfg.node_stride;
  traj.lp_exponents = cfg.diag_p;
  for (std::size_t j = 0; j <= J; ++j) {
    traj.times.push_back(times[j]);
    traj.diagnostics.push_back(ns::compute_diagnostics(v[j], times[j], cfg));
    traj.states.push_back(std::move(v[j]));
  }
  return result;
}

PicardResult picard_solve(const SpectralField& v0, const ns::Trajectory& phi_traj, const PicardConfig& pcfg,
                          const ns::SolverConfig& cfg) {
  ns::DenseBackground bg(phi_traj);
  return picard_solve(v0, bg, pcfg, cfg);
}

double duhamel_residual(const ns::Trajectory& traj, const SpectralField& u0, double nu, bool nonlinear) {
  if (!traj.has_states()) throw std::invalid_argument("duhamel residual: trajectory stores no states");
  const std::size_t nodes = traj.times.size();
  if (nodes < 2) return 0.0;
  const double h = traj.times[1] - traj.times[0];
  for (std::size_t j = 1; j < nodes; ++j) {
    if (std::abs(traj.times[j] - traj.times[j - 1] - h) > 1e-9 * h) {
      throw std::invalid_argument("duhamel residual: samples must be uniformly spaced");
    }
  }
  const GridSpec& grid = u0.grid();
  const DuhamelQuadrature quad(heat_rates(grid, nu), h);
  const SpectralField zero(grid, u0.components(), u0.is_real());
  auto n_at = [&](std::size_t j) {
    if (!nonlinear) return zero;
    return self_nonlinearity(traj.states[j]);
  };
  double worst = l2_norm(traj.states[0] - u0) / std::max(l2_norm(u0), 1e-300);
  if (l2_norm(u0) == 0.0) worst = l2_norm(traj.states[0]);
  stream_duhamel(quad, nodes, zero, n_at, [&](std::size_t j, const SpectralField& d) {
    SpectralField r = heat_semigroup(u0, traj.times[j] - traj.times[0], nu);
    r -= d;
    r -= traj.states[j];
    const double ref = l2_norm(traj.states[j]);
    worst = std::max(worst, ref > 0.0 ? l2_norm(r) / ref : l2_norm(r));
  });
  return worst;
}

DuhamelMonitor::DuhamelMonitor(const SpectralField& u0, double h, double nu, bool nonlinear)
    : u0_(u0), h_(h), nu_(nu), nonlinear_(nonlinear), quad_(heat_rates(u0.grid(), nu), h),
      d_(u0.grid(), u0.components(), u0.is_real()) {
  if (!(h > 0.0)) throw std::invalid_argument("duhamel monitor: spacing must be positive");
}

SpectralField DuhamelMonitor::nonlinear_term(const SpectralField& u) const {
  if (!nonlinear_) return SpectralField(u.grid(), u.components(), u.is_real());
  return self_nonlinearity(u);
}

void DuhamelMonitor::emit(const SpectralField& d, const SpectralField& u, double t) {
  SpectralField r = heat_semigroup(u0_, t - t0_, nu_);
  r -= d;
  r -= u;
  const double ref = l2_norm(u);
  worst_ = std::max(worst_, ref > 0.0 ? l2_norm(r) / ref : l2_norm(r));
}

void DuhamelMonitor::push(const SpectralField& u, double t) {
  if (closed_) throw std::logic_error("duhamel monitor: push after finish");
  if (count_ == 0) {
    t0_ = t;
    worst_ = l2_norm(u0_) == 0.0 ? l2_norm(u) : l2_norm(u - u0_) / l2_norm(u0_);
  } else if (std::abs(t - t0_ - static_cast<double>(count_) * h_) > 1e-9 * h_ * static_cast<double>(count_)) {
    throw std::invalid_argument("duhamel monitor: samples must be uniformly spaced");
  }
  n_.push_back(nonlinear_term(u));
  ++count_;
  if (count_ == 2) {
    pending_u_ = u;
    pending_t_ = t;
  } else if (count_ == 3) {
    quad_.advance_forward(d_, n_[0], n_[1], n_[2]);
    emit(d_, pending_u_, pending_t_);
    pending_u_ = SpectralField();
    quad_.advance_centered(d_, n_[0], n_[1], n_[2]);
    emit(d_, u, t);
  } else if (count_ > 3) {
    n_.erase(n_.begin());
    quad_.advance_centered(d_, n_[0], n_[1], n_[2]);
    emit(d_, u, t);
  }
}

double DuhamelMonitor::finish() {
  if (!closed_ && count_ == 2) {
    quad_.advance_linear(d_, n_[0], n_[1]);
    emit(d_, pending_u_, pending_t_);
  }
  closed_ = true;
  return worst_;
}

}  // namespace pwlab::picard
