#include "pwlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pwlab::experiments {

namespace {

bool finite_p(double p) { return std::isfinite(p); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

std::string p_name(double p) { return finite_p(p) ? fmt(p) : std::string("inf"); }

// Gaussian A exp(-|x|^2 / (2 s2)) in d dimensions.
double gauss_lp(double amp, double s2, double p, int d) {
  if (!finite_p(p)) return amp;
  return amp * std::exp(0.5 * d / p * std::log(2.0 * std::numbers::pi * s2 / p));
}

// |grad G| = A r / s2 exp(-r^2/(2 s2)); radial integral in closed form via the Gamma function.
double gauss_grad_lp(double amp, double s2, double p, int d) {
  if (!finite_p(p)) return amp / std::sqrt(s2) * std::exp(-0.5);
  const double log_sphere = std::log(2.0) + 0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d);
  const double log_int = log_sphere - std::log(2.0) + 0.5 * (p + d) * std::log(2.0 * s2 / p) + std::lgamma(0.5 * (p + d));
  return amp / s2 * std::exp(log_int / p);
}

std::vector<double> log_grid(double a, double b, int per_decade) {
  const int n = static_cast<int>(std::lround(std::log10(b / a) * per_decade));
  std::vector<double> out;
  for (int i = 0; i <= n; ++i) out.push_back(a * std::pow(10.0, static_cast<double>(i) / per_decade));
  return out;
}

double variation_last_decade(const std::vector<HeatEstimateRow>& rows, double t_max, double HeatEstimateRow::*field) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  for (const auto& r : rows) {
    if (r.t < t_max / 10.0 * (1.0 - 1e-12)) continue;
    lo = std::min(lo, r.*field);
    hi = std::max(hi, r.*field);
  }
  return hi > 0.0 ? (hi - lo) / hi : 0.0;
}

double envelope_weight(double t, double p) {
  const double e = finite_p(p) ? 0.5 * (1.0 - 3.0 / p) : 0.5;
  return std::pow(t, e);
}

double min_period(const GridSpec& g) { return *std::min_element(g.periods.begin(), g.periods.end()); }

double space_norm(std::span<const SpectralField> f, std::span<const double> times, std::span<const double> p_set) {
  double l3 = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const PhysicalField phys = to_physical(f[j]);
    l3 = std::max(l3, lp_norm(phys, 3.0));
    for (double p : p_set) {
      if (p <= 3.0) continue;
      weighted = std::max(weighted, envelope_weight(times[j], p) * lp_norm(phys, p));
    }
  }
  return std::max(l3, weighted);
}

}  // namespace

double theoretical_slope(double p) { return finite_p(p) ? -0.5 * (1.0 - 3.0 / p) : -0.5; }

DecayFit fit_decay(std::span<const double> t, std::span<const double> v, double t_a, double t_b, double p) {
  if (t.size() != v.size()) throw std::invalid_argument("fit_decay: series lengths differ");
  std::vector<double> x;
  std::vector<double> y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] > 0.0) || t[i] < t_a || t[i] > t_b) continue;
    if (!(v[i] > 0.0)) {
      throw std::invalid_argument("fit_decay: nonpositive value " + fmt(v[i]) + " at t=" + fmt(t[i]) + " in window");
    }
    x.push_back(std::log(t[i]));
    y.push_back(std::log(v[i]));
  }
  if (x.size() < 8) {
    throw std::invalid_argument("fit_decay: " + std::to_string(x.size()) + " samples in window, need at least 8");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  DecayFit fit;
  fit.p = p;
  fit.slope = sxy / sxx;
  fit.theory = std::isnan(p) ? 0.0 : theoretical_slope(p);
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (my + fit.slope * (x[i] - mx));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.t_a = t_a;
  fit.t_b = t_b;
  fit.samples = x.size();
  return fit;
}

bool slope_accepted(const DecayFit& fit) {
  const double theory = theoretical_slope(fit.p);
  if (!finite_p(fit.p)) return std::abs(fit.slope - theory) <= 0.15;
  if (fit.p == 3.0) return fit.slope >= theory - 0.10 && fit.slope <= theory + 0.05;
  return std::abs(fit.slope - theory) <= 0.10;
}

HeatEstimateReport heat_estimate_check(double q, double p, int d, const HeatEstimateOptions& opts) {
  if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("heat_estimate_check: need 1 < q < inf");
  if (!(p >= q)) throw std::invalid_argument("heat_estimate_check: need p >= q");
  if (d < 1 || d > 3) throw std::invalid_argument("heat_estimate_check: d must be 1, 2 or 3");
  if (!(opts.t_min > 0.0 && opts.t_max > opts.t_min && opts.s2_min > 0.0 && opts.s2_max > opts.s2_min)) {
    throw std::invalid_argument("heat_estimate_check: invalid time or width range");
  }
  HeatEstimateReport rep;
  rep.q = q;
  rep.p = p;
  rep.d = d;
  const double dp = finite_p(p) ? d / p : 0.0;
  rep.exponent = 0.5 * (d / q - dp);
  rep.grad_exponent = 0.5 * (1.0 + d / q - dp);

  const auto widths = log_grid(opts.s2_min, opts.s2_max, opts.widths_per_decade);
  auto ratios = [&](double s2, double t) {
    const double st = s2 + 2.0 * t;
    const double amp = std::pow(s2 / st, 0.5 * d);
    const double n0 = gauss_lp(1.0, s2, q, d);
    return std::pair{gauss_lp(amp, st, p, d) * std::pow(t, rep.exponent) / n0,
                     gauss_grad_lp(amp, st, p, d) * std::pow(t, rep.grad_exponent) / n0};
  };
  bool finite = true;
  for (double t : log_grid(opts.t_min, opts.t_max, opts.times_per_decade)) {
    HeatEstimateRow row;
    row.t = t;
    for (double s2 : widths) {
      const auto [r, g] = ratios(s2, t);
      row.ratio_sup = std::max(row.ratio_sup, r);
      row.grad_ratio_sup = std::max(row.grad_ratio_sup, g);
    }
    std::tie(row.ratio_fixed, row.grad_ratio_fixed) = ratios(opts.fixed_s2, t);
    finite = finite && std::isfinite(row.ratio_sup) && std::isfinite(row.grad_ratio_sup);
    rep.max_ratio = std::max(rep.max_ratio, row.ratio_sup);
    rep.max_grad_ratio = std::max(rep.max_grad_ratio, row.grad_ratio_sup);
    rep.rows.push_back(row);
  }
  rep.variation = variation_last_decade(rep.rows, opts.t_max, &HeatEstimateRow::ratio_sup);
  rep.grad_variation = variation_last_decade(rep.rows, opts.t_max, &HeatEstimateRow::grad_ratio_sup);
  // q = p: the semigroup is an L^p contraction.
  rep.bounded = finite && (p > q || rep.max_ratio <= 1.0 + 1e-12);
  return rep;
}

// ---- stability ----------------------------------------------------------------

void StabilityConfig::validate() const {
  if (!(eps > 0.0)) throw std::invalid_argument("stability: eps must be positive");
  if (!(delta > 0.0)) throw std::invalid_argument("stability: delta must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("stability: T must be positive");
  if (t_a > 0.0 && !(t_b > t_a)) throw std::invalid_argument("stability: fit window needs t_b > t_a");
  if (t_a < 0.0) throw std::invalid_argument("stability: t_a must be positive (0 selects the default window)");
  if (std::find(p_set.begin(), p_set.end(), 3.0) == p_set.end()) {
    throw std::invalid_argument("stability: p_set must contain 3 (the growth abort uses ||v||_3)");
  }
  for (double p : p_set) {
    if (!(p >= 3.0)) throw std::invalid_argument("stability: exponents must be >= 3");
  }
  if (grid3.dim != 3) throw std::invalid_argument("stability: grid3 must be three-dimensional");
  if (2.0 * v0_spec.radius > min_period(grid3) / 8.0) {
    throw std::invalid_argument("stability: perturbation support diameter " + fmt(2.0 * v0_spec.radius) +
                                " exceeds box/8 = " + fmt(min_period(grid3) / 8.0));
  }
  if (!(growth_abort > 1.0)) throw std::invalid_argument("stability: growth_abort must exceed 1");
}

bool StabilityReport::passed() const {
  if (aborted) return false;
  return std::all_of(accepted.begin(), accepted.end(), [](bool b) { return b; });
}

ProfileRestart evolve_profile_until(const SpectralField& h0, const ns::SolverConfig& solver, double delta,
                                    double t_max) {
  ns::validate_initial(h0);
  const ns::Stepper stepper(h0.grid(), solver);
  ProfileRestart r{h0, 0.0, 0};
  while (l2_norm(r.h) >= delta) {
    if (r.t_delta >= t_max) {
      throw std::runtime_error("profile: ||h||_2 = " + fmt(l2_norm(r.h)) + " still >= delta = " + fmt(delta) +
                               " at t = " + fmt(r.t_delta));
    }
    stepper.advance(r.h, r.t_delta);
    ++r.steps;
    r.t_delta = static_cast<double>(r.steps) * solver.dt;
  }
  return r;
}

SpectralField scaled_perturbation(const GridSpec& grid3, const PerturbationSpec& spec, double eps) {
  SpectralField v = localized_perturbation(grid3, spec);
  const double n = lp_norm(v, 3.0);
  if (n > 0.0 && eps > 0.0) {
    v *= eps / n;
  } else {
    v.set_zero();
  }
  return v;
}

StabilityReport stability_run(const StabilityConfig& cfg) {
  cfg.validate();
  ns::SolverConfig solver = cfg.solver;
  solver.T = cfg.T;
  solver.keep_states = false;
  solver.dense_output = false;
  solver.diag_p = cfg.p_set;
  solver.validate();
  const std::size_t steps = solver.steps();

  StabilityReport rep;
  auto lattice = planewave::PlaneWaveLattice::make(cfg.prof0.c, cfg.prof0.h.grid(), cfg.grid3);
  ProfileRestart restart = evolve_profile_until(cfg.prof0.h, solver, cfg.delta, cfg.t_delta_max);
  rep.t_delta = restart.t_delta;
  rep.profile_l2 = l2_norm(restart.h);

  planewave::PlaneWaveBackground bg({restart.h, cfg.prof0.c}, lattice, solver, steps);
  const SpectralField v0 = scaled_perturbation(cfg.grid3, cfg.v0_spec, cfg.eps);
  rep.v0_l3 = lp_norm(v0, 3.0);

  const auto i3 = static_cast<std::size_t>(std::find(cfg.p_set.begin(), cfg.p_set.end(), 3.0) - cfg.p_set.begin());
  auto hook = [&](const ns::DiagnosticsRow& row) {
    const auto n = static_cast<std::size_t>(std::lround(row.t / solver.dt));
    rep.phi_linf.push_back(lp_norm(to_physical(bg.profile_state(n)), kInf));
    if (rep.v0_l3 > 0.0 && row.lp[i3] > cfg.growth_abort * rep.v0_l3) {
      rep.aborted = true;
      rep.note = "smallness violated: ||v||_3 = " + fmt(row.lp[i3]) + " at t = " + fmt(row.t) + " exceeds " +
                 fmt(cfg.growth_abort) + " x ||v0||_3 = " + fmt(rep.v0_l3);
      return false;
    }
    return true;
  };
  try {
    rep.v = ns::evolve_perturbation(v0, bg, solver, hook);
  } catch (const ns::SolverError& e) {
    rep.aborted = true;
    rep.note = std::string("smallness violated: solver abort (") + e.what() + ")";
    return rep;
  }

  const DecayWindow w = decay_window(cfg.grid3, cfg.v0_spec, cfg.T, cfg.t_a, cfg.t_b);
  rep.t_box = w.t_box;
  rep.t_a = w.t_a;
  rep.t_b = w.t_b;
  rep.window_decades = w.decades;
  rep.degraded = w.degraded;
  if (rep.v0_l3 == 0.0) {
    rep.note = "zero perturbation: fits skipped";
    return rep;
  }
  std::vector<std::vector<double>> series(cfg.p_set.size());
  for (const auto& row : rep.v.diagnostics) {
    for (std::size_t j = 0; j < series.size(); ++j) series[j].push_back(row.lp[j]);
  }
  DecayJudgement jd = judge_decay(rep.v.times, series, cfg.p_set, w, cfg.growth_abort);
  rep.fits = std::move(jd.fits);
  rep.envelopes = std::move(jd.envelopes);
  rep.accepted = std::move(jd.accepted);
  rep.note = jd.note;
  return rep;
}

DecayWindow decay_window(const GridSpec& grid3, const PerturbationSpec& spec, double T, double t_a, double t_b) {
  DecayWindow w;
  const double R = spec.radius;
  const double gap = 0.5 * min_period(grid3) - R;
  w.t_box = gap * gap / 4.0;
  const double core = spec.shape == PerturbationShape::vortex ? spec.core : grid3.min_spacing();
  w.t_a = t_a > 0.0 ? t_a : 4.0 * core * core;
  w.t_b = std::min({t_a > 0.0 ? t_b : R * R / 4.0, w.t_box, T});
  w.decades = w.t_b > w.t_a ? std::log10(w.t_b / w.t_a) : 0.0;
  w.degraded = w.decades < 1.0;
  return w;
}

DecayJudgement judge_decay(std::span<const double> times, const std::vector<std::vector<double>>& series,
                           std::span<const double> p_set, const DecayWindow& w, double growth_abort) {
  DecayJudgement jd;
  std::vector<std::string> notes;
  for (std::size_t j = 0; j < p_set.size(); ++j) {
    const double p = p_set[j];
    bool fitted = false;
    try {
      jd.fits.push_back(fit_decay(times, series[j], w.t_a, w.t_b, p));
      fitted = true;
    } catch (const std::invalid_argument& e) {
      notes.push_back("p=" + p_name(p) + ": " + e.what());
    }

    EnvelopeCheck env;
    env.p = p;
    bool first = true;
    bool finite = true;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double t = times[i];
      if (t < w.t_a || t > w.t_b || !(t > 0.0)) continue;
      const double e = envelope_weight(t, p) * series[j][i];
      finite = finite && std::isfinite(e);
      if (first) env.at_start = e;
      first = false;
      env.sup = std::max(env.sup, e);
    }
    env.bounded = !first && finite && env.sup <= growth_abort * env.at_start;
    if (first) notes.push_back("p=" + p_name(p) + ": no samples in the envelope window");
    jd.envelopes.push_back(env);
    jd.accepted.push_back(w.degraded ? env.bounded : fitted && slope_accepted(jd.fits.back()));
  }
  if (w.degraded) {
    notes.insert(notes.begin(), "window spans " + fmt(w.decades) + " decades (< 1): judged by the bounded-envelope check");
  }
  for (const auto& n : notes) jd.note += (jd.note.empty() ? "" : "; ") + n;
  return jd;
}

// ---- Phi contraction --------------------------------------------------------

void ContractionConfig::validate() const {
  if (!(delta > 0.0)) throw std::invalid_argument("contraction: delta must be positive");
  if (!(M > 0.0)) throw std::invalid_argument("contraction: M must be positive");
  if (!(T > 0.0)) throw std::invalid_argument("contraction: T must be positive");
  if (pairs < 1) throw std::invalid_argument("contraction: need at least one pair");
  if (node_stride < 1) throw std::invalid_argument("contraction: node_stride must be >= 1");
  if (band < 1) throw std::invalid_argument("contraction: band must be >= 1");
  for (double p : p_set) {
    if (!(p > 3.0)) throw std::invalid_argument("contraction: weighted exponents must exceed 3");
  }
}

double stability_distance(std::span<const SpectralField> f, std::span<const double> times,
                          std::span<const double> p_set) {
  if (f.size() != times.size()) throw std::invalid_argument("stability_distance: path and times differ in length");
  double l3 = 0.0;
  double weighted = 0.0;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const PhysicalField phys = to_physical(f[j]);
    l3 = std::max(l3, lp_norm(phys, 3.0));
    for (double p : p_set) {
      if (p <= 3.0) continue;
      weighted = std::max(weighted, envelope_weight(times[j], p) * lp_norm(phys, p));
    }
  }
  return weighted + l3;
}

PairRecord phi_pair_ratio(std::span<const SpectralField> v, std::span<const SpectralField> w,
                          std::span<const PhysicalField> phi, const std::vector<double>& times,
                          std::span<const double> p_set, double nu) {
  const std::size_t J = times.size();
  if (J < 2 || v.size() != J || w.size() != J || phi.size() != J) {
    throw std::invalid_argument("phi_pair_ratio: paths must share the node grid (>= 2 nodes)");
  }
  const double h = times[1] - times[0];
  for (std::size_t j = 1; j < J; ++j) {
    if (std::abs(times[j] - times[j - 1] - h) > 1e-9 * h) throw std::invalid_argument("phi_pair_ratio: nodes must be uniform");
  }
  PairRecord rec;
  std::vector<SpectralField> diff;
  std::vector<SpectralField> n;
  diff.reserve(J);
  n.reserve(J);
  for (std::size_t j = 0; j < J; ++j) {
    diff.push_back(v[j] - w[j]);
    n.push_back(perturbation_nonlinearity(v[j], phi[j]) - perturbation_nonlinearity(w[j], phi[j]));
  }
  rec.d_in = stability_distance(diff, times, p_set);

  // Phi v - Phi w = -int_0^t e^{(t-s) Delta} (N(v) - N(w))(s) ds
  DuhamelQuadrature quad(heat_rates(v[0].grid(), nu), h);
  std::vector<SpectralField> out;
  out.reserve(J);
  SpectralField d(v[0].grid(), v[0].components(), v[0].is_real());
  out.push_back(d);
  for (std::size_t j = 0; j + 1 < J; ++j) {
    if (J == 2) {
      quad.advance_linear(d, n[0], n[1]);
    } else if (j == 0) {
      quad.advance_forward(d, n[0], n[1], n[2]);
    } else {
      quad.advance_centered(d, n[j - 1], n[j], n[j + 1]);
    }
    out.push_back(d);
  }
  rec.d_out = stability_distance(out, times, p_set);
  rec.ratio = rec.d_in > 0.0 ? rec.d_out / rec.d_in : 0.0;
  return rec;
}

ContractionReport phi_contraction_check(const ContractionConfig& cfg) {
  cfg.validate();
  ns::SolverConfig solver = cfg.solver;
  solver.T = cfg.T;
  solver.validate();
  const std::size_t steps = solver.steps();
  if (steps % static_cast<std::size_t>(cfg.node_stride) != 0) {
    throw std::invalid_argument("contraction: node_stride must divide the number of steps");
  }

  ContractionReport rep;
  rep.M = cfg.M;
  auto lattice = planewave::PlaneWaveLattice::make(cfg.prof0.c, cfg.prof0.h.grid(), cfg.grid3);
  SpectralField h = cfg.prof0.h;
  if (!cfg.early_start) {
    ProfileRestart r = evolve_profile_until(h, solver, cfg.delta, cfg.t_delta_max);
    h = r.h;
    rep.t_delta = r.t_delta;
  }
  rep.profile_l2 = l2_norm(h);

  planewave::PlaneWaveBackground bg({h, cfg.prof0.c}, lattice, solver, steps);
  std::vector<double> times;
  std::vector<PhysicalField> phi;
  for (std::size_t n = 0; n <= steps; n += static_cast<std::size_t>(cfg.node_stride)) {
    times.push_back(static_cast<double>(n) * solver.dt);
    phi.push_back(to_physical(bg.state(n)));
    rep.phi_linf = std::max(rep.phi_linf, lp_norm(phi.back(), kInf));
  }

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> radius(0.25, 1.0);
  auto random_path = [&](std::uint64_t seed) {
    const SpectralField xi = random_solenoidal(cfg.grid3, cfg.band, 1.0, seed);
    std::vector<SpectralField> path;
    for (double t : times) path.push_back(heat_semigroup(xi, t, solver.nu));
    const double s = cfg.M * radius(rng) / space_norm(path, times, cfg.p_set);
    for (auto& f : path) f *= s;
    return path;
  };

  std::size_t worst = 0;
  for (int i = 0; i < cfg.pairs; ++i) {
    const auto v = random_path(cfg.seed * 1000003u + 2u * static_cast<std::uint64_t>(i));
    const auto w = random_path(cfg.seed * 1000003u + 2u * static_cast<std::uint64_t>(i) + 1u);
    PairRecord rec = phi_pair_ratio(v, w, phi, times, cfg.p_set, solver.nu);
    rec.norm_v = space_norm(v, times, cfg.p_set);
    rec.norm_w = space_norm(w, times, cfg.p_set);
    if (rec.ratio > rep.max_ratio) worst = rep.pairs.size();
    rep.max_ratio = std::max(rep.max_ratio, rec.ratio);
    rep.pairs.push_back(rec);
  }
  rep.contraction = rep.max_ratio < 1.0;
  rep.within_bound = rep.max_ratio <= cfg.ratio_bound;
  if (!rep.within_bound) {
    const PairRecord& p = rep.pairs[worst];
    rep.note = std::string(rep.contraction ? "ratio above bound" : "contraction failure") + ": ratio " +
               fmt(p.ratio) + " for pair " + std::to_string(worst) + " (|v| = " + fmt(p.norm_v) + ", |w| = " +
               fmt(p.norm_w) + ", d(v,w) = " + fmt(p.d_in) + ", d(Phi v, Phi w) = " + fmt(p.d_out) + ")";
  }
  return rep;
}

// ---- Kato scan --------------------------------------------------------------------

KatoScanReport kato_smallness_scan(const KatoScanConfig& cfg) {
  if (cfg.grid3.dim != 3) throw std::invalid_argument("kato scan: grid3 must be three-dimensional");
  ns::SolverConfig solver = cfg.solver;
  solver.keep_states = false;
  solver.dense_output = false;
  solver.diag_p = {3.0, kInf};
  solver.validate();

  KatoScanReport rep;
  for (double amp : cfg.amplitudes) {
    KatoScanEntry e;
    e.amplitude = amp;
    const SpectralField u0 = scaled_perturbation(cfg.grid3, cfg.shape, amp);
    e.l3 = lp_norm(u0, 3.0);
    try {
      const ns::Trajectory traj = ns::evolve(u0, solver);
      e.completed = true;
      e.nonincreasing = true;
      double prev = kInf;
      for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const double t = traj.times[i];
        const double env = std::sqrt(t) * traj.diagnostics[i].lp[1];
        e.times.push_back(t);
        e.envelope.push_back(env);
        e.envelope_sup = std::max(e.envelope_sup, env);
        if (t >= cfg.transient_fraction * solver.T) {
          if (env > prev * (1.0 + 1e-9)) e.nonincreasing = false;
          prev = env;
        }
      }
      e.envelope_final = e.envelope.back();
    } catch (const ns::SolverError& err) {
      e.error = err.what();
    }
    rep.entries.push_back(e);
  }

  std::vector<const KatoScanEntry*> sorted;
  for (const auto& e : rep.entries) sorted.push_back(&e);
  std::stable_sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->amplitude < b->amplitude; });
  for (const auto* e : sorted) {
    if (!e->bounded()) break;
    rep.frontier = e->amplitude;
  }
  return rep;
}

}  // namespace pwlab::experiments
