#include "pwlab/cli.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "pwlab/cgl.hpp"
#include "pwlab/experiments.hpp"
#include "pwlab/initial_data.hpp"
#include "pwlab/picard.hpp"
#include "pwlab/planewave.hpp"
#include "pwlab/snapshot.hpp"

#ifndef PWLAB_VERSION
#define PWLAB_VERSION "unknown"
#endif

namespace pwlab::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using config::KeyDef;
using config::Resolved;
using config::Schema;
using config::ValueType;

namespace {

// ---- schemas --------------------------------------------------------------------

void add(Schema& s, const std::string& key, ValueType type, std::optional<std::string> fallback,
         const std::string& help) {
  s.push_back(KeyDef{key, type, std::move(fallback), help});
}

void common_keys(Schema& s) {
  add(s, "seed", ValueType::integer, "1", "seed for random fields; --seed overrides");
  add(s, "grid.dealias", ValueType::real, "0.6666666666666666", "kept fraction f: modes with 2|m| < f N survive");
}

void solver_keys(Schema& s, bool with_T, bool ns, const std::string& diag_p) {
  if (ns) add(s, "solver.nu", ValueType::real, "1", "viscosity");
  add(s, "solver.dt", ValueType::real, "1e-3", "time step");
  if (with_T) add(s, "solver.T", ValueType::real, "1", "horizon (integer multiple of dt)");
  add(s, "solver.stride", ValueType::integer, "1", "sample every this many steps");
  add(s, "solver.cfl", ValueType::real, "0.5", "abort threshold of the CFL-type check");
  add(s, "solver.nonlinear", ValueType::boolean, "true", "false: linear (heat) flow");
  add(s, "solver.diag_p", ValueType::real_list, diag_p, "Lebesgue exponents of the diagnostics");
  if (ns) add(s, "solver.diag_s", ValueType::real, "1", "Sobolev index of the hs column");
}

void grid_keys(Schema& s, const std::string& n) {
  add(s, "grid.n", ValueType::integer, n, "points per axis");
  add(s, "grid.L", ValueType::real, "2pi", "period per axis");
}

void wave_keys(Schema& s) {
  add(s, "wave.c", ValueType::rational, "0", "wave speed m/n");
  add(s, "profile.n", ValueType::integer, "64", "profile points along w");
  add(s, "profile.nz", ValueType::integer, "0", "profile points along z (0: profile.n)");
  add(s, "profile.L", ValueType::real, "2pi", "profile period along w (0: derived from box)");
  add(s, "profile.Lz", ValueType::real, "0", "profile period along z (0: profile.L)");
  add(s, "profile.kind", ValueType::text, "random", "random | zero | snapshot");
  add(s, "profile.band", ValueType::integer, "4", "random profile: max |mode| per axis");
  add(s, "profile.l2", ValueType::real, "1", "random profile: L2 norm");
  add(s, "profile.path", ValueType::text, "", "snapshot profile file");
  add(s, "box.points", ValueType::real_list, "", "3D points (empty: smallest commensurable box)");
  add(s, "box.periods", ValueType::real_list, "", "3D periods (with box.points)");
  add(s, "box.ny", ValueType::integer, "0", "c = 0 only: points along y (0: profile.n)");
  add(s, "box.ly", ValueType::real, "0", "c = 0 only: period along y (0: profile.L)");
}

void perturbation_keys(Schema& s, const std::string& radius) {
  add(s, "perturbation.shape", ValueType::text, "vortex", "vortex | bump");
  add(s, "perturbation.radius", ValueType::real, radius, "support radius R");
  add(s, "perturbation.core", ValueType::real, "0", "vortex core a (0: grid spacing)");
}

void stability_keys(Schema& s, const std::string& p_set) {
  add(s, "stability.eps", ValueType::real, "0.05", "||v0||_3 after rescaling");
  add(s, "stability.delta", ValueType::real, "0.05", "profile L2 threshold for the injection time");
  add(s, "stability.p_set", ValueType::real_list, p_set, "exponents of the decay fits");
  add(s, "stability.T", ValueType::real, "1", "horizon after injection");
  add(s, "stability.t_a", ValueType::real, "0", "fit window start (0: default window)");
  add(s, "stability.t_b", ValueType::real, "0", "fit window end");
  add(s, "stability.t_delta_max", ValueType::real, "50", "give up if the profile is not below delta by then");
  add(s, "stability.growth_abort", ValueType::real, "10", "abort when ||v||_3 exceeds this multiple of ||v0||_3");
}

std::map<std::string, Schema> build_schemas() {
  std::map<std::string, Schema> m;
  for (const std::string name : {"simulate2d", "simulate3d"}) {
    Schema s;
    common_keys(s);
    grid_keys(s, name == "simulate2d" ? "64" : "32");
    solver_keys(s, true, true, "3, 6, inf");
    add(s, "init.kind", ValueType::text, name == "simulate2d" ? "taylor_green" : "random",
        "taylor_green (2D) | random | snapshot");
    add(s, "init.amplitude", ValueType::real, "1", "Taylor-Green amplitude");
    add(s, "init.band", ValueType::integer, "4", "random data: max |mode| per axis");
    add(s, "init.l2", ValueType::real, "1", "random data: L2 norm");
    add(s, "init.path", ValueType::text, "", "snapshot file");
    add(s, "output.snapshots", ValueType::boolean, "false", "write every sampled state");
    add(s, "check.exact_tol", ValueType::real, "1e-8", "Taylor-Green error and energy tolerance");
    add(s, "check.div_tol", ValueType::real, "1e-12", "divergence residual bound");
    add(s, "check.duhamel", ValueType::boolean, "true", "stream the Duhamel residual");
    add(s, "check.duhamel_tol", ValueType::real, "1e-6", "Duhamel residual bound");
    add(s, "check.energy_tol", ValueType::real, "1e-12", "allowed relative energy increase per sample");
    m[name] = s;
  }
  {
    Schema s;
    common_keys(s);
    wave_keys(s);
    solver_keys(s, true, true, "3, 6, inf");
    add(s, "check.tol", ValueType::real, "1e-6", "commutation bound");
    m["planewave-check"] = s;
  }
  {
    Schema s;
    common_keys(s);
    wave_keys(s);
    solver_keys(s, false, true, "3, 6, inf");
    perturbation_keys(s, "1");
    add(s, "perturbation.eps", ValueType::real, "0.05", "||v0||_3 after rescaling");
    add(s, "picard.L", ValueType::real, "0", "weight rate (0: 4 M (1 + T_star))");
    add(s, "picard.T_star", ValueType::real, "1", "horizon");
    add(s, "picard.gammas", ValueType::real_list, "0.25, 0.5, 0.75, 1", "weighted-norm exponents gamma");
    add(s, "picard.holder_p", ValueType::real, "4", "Holder exponent of the recurrence");
    add(s, "picard.max_iter", ValueType::integer, "12", "iteration cap");
    add(s, "picard.rel_tol", ValueType::real, "1e-12", "stop once W_n <= rel_tol W_1");
    add(s, "picard.node_stride", ValueType::integer, "1", "quadrature nodes every this many steps");
    add(s, "check.ratio_bound", ValueType::real, "0.6", "bound on W_{n+1} / W_n");
    add(s, "check.ratio_iters", ValueType::integer, "8", "ratios checked for n = 1..this");
    add(s, "check.match_tol", ValueType::real, "1e-6", "Picard vs stepping, relative sup-L2");
    add(s, "check.m_bound_max", ValueType::real, "2", "largest admissible ||phi||_inf + ||grad phi||_inf");
    add(s, "check.local_factor", ValueType::real, "2", "||v(T_star)||_3 <= local_factor eps");
    m["picard"] = s;
  }
  {
    Schema s;
    common_keys(s);
    wave_keys(s);
    solver_keys(s, false, true, "3, 6, inf");
    perturbation_keys(s, "1");
    stability_keys(s, "3, 6, inf");
    m["stability"] = s;
  }
  {
    Schema s;
    add(s, "seed", ValueType::integer, "1", "unused; recorded");
    add(s, "heat.cases", ValueType::text, "2,inf,3; 3,3,3; 3,6,3; 2,2,2", "q,p,d triples separated by ';'");
    add(s, "heat.t_min", ValueType::real, "0.1", "first time");
    add(s, "heat.t_max", ValueType::real, "100", "last time");
    add(s, "heat.times_per_decade", ValueType::integer, "20", "time samples per decade");
    add(s, "heat.s2_min", ValueType::real, "1e-4", "smallest Gaussian variance");
    add(s, "heat.s2_max", ValueType::real, "1e8", "largest Gaussian variance");
    add(s, "heat.widths_per_decade", ValueType::integer, "40", "Gaussian widths per decade");
    add(s, "heat.fixed_s2", ValueType::real, "1", "variance of the single reported Gaussian");
    add(s, "check.tol", ValueType::real, "0.01", "flatness over the last decade");
    m["heatdecay"] = s;
  }
  {
    Schema s;
    common_keys(s);
    wave_keys(s);
    solver_keys(s, false, true, "3, 6, inf");
    add(s, "contraction.delta", ValueType::real, "0.05", "profile L2 threshold");
    add(s, "contraction.early_start", ValueType::boolean, "false", "skip the profile-only phase");
    add(s, "contraction.t_delta_max", ValueType::real, "50", "give up if the profile is not below delta by then");
    add(s, "contraction.M", ValueType::real, "0.05", "ball radius");
    add(s, "contraction.p_set", ValueType::real_list, "4, 6, inf", "exponents p > 3 of the distance");
    add(s, "contraction.T", ValueType::real, "1", "horizon");
    add(s, "contraction.node_stride", ValueType::integer, "1", "quadrature nodes every this many steps");
    add(s, "contraction.pairs", ValueType::integer, "20", "random pairs");
    add(s, "contraction.band", ValueType::integer, "4", "random paths: max |mode| per axis");
    add(s, "contraction.ratio_bound", ValueType::real, "0.5", "bound on the Lipschitz ratio");
    m["contraction"] = s;
  }
  {
    Schema s;
    common_keys(s);
    grid_keys(s, "32");
    solver_keys(s, true, true, "3, 6, inf");
    perturbation_keys(s, "1");
    add(s, "scan.amplitudes", ValueType::real_list, "0, 0.01, 0.1, 1", "target ||u0||_3 values");
    add(s, "scan.transient_fraction", ValueType::real, "0.2", "leading fraction of T treated as transient");
    m["scan"] = s;
  }
  {
    Schema s;
    common_keys(s);
    add(s, "grid.dim", ValueType::integer, "2", "2 or 3");
    grid_keys(s, "64");
    add(s, "cgl.eps", ValueType::real, "1", "diffusion coefficient");
    add(s, "cgl.k", ValueType::real, "1", "nonlinear damping");
    solver_keys(s, true, false, "2, 4, inf");
    add(s, "init.kind", ValueType::text, "random", "random | constant | snapshot");
    add(s, "init.amplitude", ValueType::real, "0.5", "constant data: modulus");
    add(s, "init.phase", ValueType::real, "0", "constant data: argument");
    add(s, "init.band", ValueType::integer, "4", "random data: max |mode| per axis");
    add(s, "init.l2", ValueType::real, "1", "random data: L2 norm");
    add(s, "init.path", ValueType::text, "", "snapshot file");
    add(s, "output.snapshots", ValueType::boolean, "false", "write every sampled state");
    add(s, "check.energy_tol", ValueType::real, "1e-6", "energy identity defect bound (stride 1)");
    add(s, "check.ode_tol", ValueType::real, "1e-8", "constant data: error against the exact ODE solution");
    m["cgl evolve"] = s;
  }
  {
    Schema s;
    common_keys(s);
    wave_keys(s);
    add(s, "cgl.eps", ValueType::real, "1", "diffusion coefficient");
    add(s, "cgl.k", ValueType::real, "1", "nonlinear damping");
    solver_keys(s, true, false, "2, 4, inf");
    add(s, "check.tol", ValueType::real, "1e-6", "commutation bound");
    m["cgl planewave-check"] = s;
  }
  {
    Schema s;
    common_keys(s);
    wave_keys(s);
    add(s, "cgl.eps", ValueType::real, "1", "diffusion coefficient");
    add(s, "cgl.k", ValueType::real, "1", "nonlinear damping");
    solver_keys(s, false, false, "2, 4, inf");
    perturbation_keys(s, "1");
    stability_keys(s, "3, 6, inf");
    m["cgl stability"] = s;
  }
  return m;
}

const std::map<std::string, Schema>& schemas() {
  static const std::map<std::string, Schema> m = build_schemas();
  return m;
}

// ---- run context ----------------------------------------------------------------

std::string bound_le(double tol) { return "<= " + config::format_real(tol); }

std::string bound_in(double lo, double hi) {
  return "in [" + config::format_real(lo) + ", " + config::format_real(hi) + "]";
}

Check check_le(const std::string& name, double value, double tol, const std::string& detail = {}) {
  return Check{name, std::isfinite(value) && value <= tol, value, bound_le(tol), detail};
}

struct Run {
  const Resolved& cfg;
  fs::path out;
  std::uint64_t seed = 1;
  std::vector<Check> checks;
  json results = json::object();
  std::ofstream diag;

  std::ostream& diagnostics() {
    if (!diag.is_open()) diag.open(out / "diagnostics.csv");
    return diag;
  }
  fs::path snapshot_path(const std::string& name) {
    fs::create_directories(out / "snapshots");
    return out / "snapshots" / name;
  }
};

std::string sample_name(std::size_t i) {
  std::ostringstream os;
  os << "state_" << std::setw(6) << std::setfill('0') << i << ".snap";
  return os.str();
}

json number(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? json("nan") : json(x > 0 ? "inf" : "-inf");
}

json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

int to_int(std::int64_t v, const std::string& key) {
  if (v < 0 || v > 1 << 30) throw config::ConfigError("key '" + key + "' out of range");
  return static_cast<int>(v);
}

GridSpec cube_grid(const Resolved& cfg, int dim) {
  GridSpec g = GridSpec::cube(dim, to_int(cfg.integer("grid.n"), "grid.n"), cfg.real("grid.L"));
  g.dealias_fraction = cfg.real("grid.dealias");
  g.validate();
  return g;
}

ns::SolverConfig ns_solver(const Resolved& cfg, double T) {
  ns::SolverConfig s;
  s.nu = cfg.real("solver.nu");
  s.dt = cfg.real("solver.dt");
  s.T = T;
  s.snapshot_stride = to_int(cfg.integer("solver.stride"), "solver.stride");
  s.cfl = cfg.real("solver.cfl");
  s.nonlinear = cfg.boolean("solver.nonlinear");
  s.diag_p = cfg.reals("solver.diag_p");
  s.diag_s = cfg.real("solver.diag_s");
  s.validate();
  return s;
}

cgl::CGLConfig cgl_solver(const Resolved& cfg, double T) {
  cgl::CGLConfig s;
  s.eps = cfg.real("cgl.eps");
  s.k = cfg.real("cgl.k");
  s.dt = cfg.real("solver.dt");
  s.T = T;
  s.snapshot_stride = to_int(cfg.integer("solver.stride"), "solver.stride");
  s.cfl = cfg.real("solver.cfl");
  s.nonlinear = cfg.boolean("solver.nonlinear");
  s.diag_p = cfg.reals("solver.diag_p");
  s.validate();
  return s;
}

std::vector<int> int_list(const std::vector<double>& xs, const std::string& key) {
  std::vector<int> out;
  for (double x : xs) {
    if (!(x >= 1.0) || x != std::floor(x)) throw config::ConfigError("key '" + key + "' expects positive integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

std::optional<GridSpec> explicit_box(const Resolved& cfg) {
  const auto pts = cfg.reals("box.points");
  const auto per = cfg.reals("box.periods");
  if (pts.empty() && per.empty()) return std::nullopt;
  if (pts.size() != 3 || per.size() != 3) {
    throw config::ConfigError("box.points and box.periods need three entries each");
  }
  GridSpec g = GridSpec::box(int_list(pts, "box.points"), per);
  g.dealias_fraction = cfg.real("grid.dealias");
  g.validate();
  return g;
}

GridSpec profile_grid(const Resolved& cfg, Rational c, const std::optional<GridSpec>& box) {
  int n = to_int(cfg.integer("profile.n"), "profile.n");
  int nz = to_int(cfg.integer("profile.nz"), "profile.nz");
  double L = cfg.real("profile.L");
  double Lz = cfg.real("profile.Lz");
  if (L == 0.0) {
    if (!box) throw config::ConfigError("profile.L = 0 needs box.points and box.periods");
    const double s = std::sqrt(1.0 + c.value() * c.value());
    L = box->periods[0] / s;
    if (Lz == 0.0) Lz = box->periods[2];
    if (nz == 0) nz = box->points[2];
  }
  if (nz == 0) nz = n;
  if (Lz == 0.0) Lz = L;
  GridSpec g = GridSpec::box({n, nz}, {L, Lz});
  g.dealias_fraction = cfg.real("grid.dealias");
  g.validate();
  return g;
}

planewave::PlaneWaveLattice lattice_for(const Resolved& cfg, Rational c, const GridSpec& grid2,
                                        const std::optional<GridSpec>& box) {
  if (box) return planewave::PlaneWaveLattice::make(c, grid2, *box);
  const std::int64_t ny = cfg.integer("box.ny");
  const double ly = cfg.real("box.ly");
  return planewave::PlaneWaveLattice::standard(c, grid2, ly > 0.0 ? ly : grid2.periods[0],
                                               ny > 0 ? to_int(ny, "box.ny") : grid2.points[0]);
}

// Profile from the `profile.*` keys: two real components for NS, one complex for CGL.
SpectralField make_profile(Run& run, const GridSpec& grid2, Rational c, bool scalar) {
  const Resolved& cfg = run.cfg;
  const std::string& kind = cfg.text("profile.kind");
  if (kind == "zero") return SpectralField(grid2, scalar ? 1 : 2, !scalar);
  if (kind == "random") {
    const int band = to_int(cfg.integer("profile.band"), "profile.band");
    const double l2 = cfg.real("profile.l2");
    if (scalar) return random_scalar(grid2, band, l2, run.seed, false);
    return random_solenoidal(grid2, band, l2, run.seed);
  }
  if (kind == "snapshot") {
    Snapshot snap = read_snapshot(fs::path(cfg.text("profile.path")));
    if (snap.wave_speed && !(*snap.wave_speed == c)) {
      throw config::ConfigError("profile snapshot has c = " + snap.wave_speed->str() + " but wave.c = " + c.str());
    }
    if (!(snap.field.grid().points == grid2.points)) {
      throw config::ConfigError("profile snapshot grid does not match profile.n / profile.nz");
    }
    return snap.field;
  }
  throw config::ConfigError("profile.kind: unknown value '" + kind + "' (random | zero | snapshot)");
}

PerturbationSpec perturbation(const Resolved& cfg, const GridSpec& grid3) {
  PerturbationSpec spec;
  spec.shape = parse_shape(cfg.text("perturbation.shape"));
  spec.radius = cfg.real("perturbation.radius");
  const double core = cfg.real("perturbation.core");
  spec.core = core > 0.0 ? core : grid3.min_spacing();
  return spec;
}

json grid_json(const GridSpec& g) {
  return json{{"points", g.points}, {"periods", numbers(g.periods)}, {"dealias", g.dealias_fraction}};
}

json lattice_json(const planewave::PlaneWaveLattice& lat) {
  return json{{"c", lat.c.str()}, {"p", lat.p}, {"q", lat.q}, {"profile_grid", grid_json(lat.grid2)},
              {"box", grid_json(lat.grid3)}};
}

json fit_json(const experiments::DecayFit& f) {
  return json{{"p", number(f.p)},       {"slope", f.slope},  {"theory", f.theory}, {"residual", f.residual},
              {"t_a", f.t_a},           {"t_b", f.t_b},      {"samples", f.samples}};
}

json window_json(const experiments::DecayWindow& w) {
  return json{{"t_box", w.t_box}, {"t_a", w.t_a}, {"t_b", w.t_b}, {"decades", w.decades}, {"degraded", w.degraded}};
}

// One check per exponent of a decay judgement.
void decay_checks(Run& run, const std::vector<double>& p_set, const experiments::DecayWindow& w,
                  const std::vector<experiments::DecayFit>& fits,
                  const std::vector<experiments::EnvelopeCheck>& envs, const std::vector<bool>& accepted,
                  double growth_abort) {
  for (std::size_t j = 0; j < p_set.size() && j < accepted.size(); ++j) {
    const double p = p_set[j];
    const std::string tag = std::isinf(p) ? "inf" : config::format_real(p);
    if (w.degraded) {
      const auto& e = envs[j];
      const double ratio = e.at_start > 0.0 ? e.sup / e.at_start : 0.0;
      run.checks.push_back(Check{"envelope_p" + tag, accepted[j], ratio, bound_le(growth_abort),
                                 "window under one decade: bounded-envelope check"});
      continue;
    }
    auto it = std::find_if(fits.begin(), fits.end(), [&](const experiments::DecayFit& f) {
      return f.p == p || (std::isinf(f.p) && std::isinf(p));
    });
    const double theory = experiments::theoretical_slope(p);
    double lo = theory - 0.10, hi = theory + 0.10;
    if (p == 3.0) {
      lo = -0.10;
      hi = 0.05;
    } else if (std::isinf(p)) {
      lo = theory - 0.15;
      hi = theory + 0.15;
    }
    const double slope = it != fits.end() ? it->slope : std::numeric_limits<double>::quiet_NaN();
    run.checks.push_back(Check{"slope_p" + tag, accepted[j], slope, bound_in(lo, hi), "log-log fit"});
  }
}

// ---- commands -------------------------------------------------------------------

void run_simulate(Run& run, int dim) {
  const Resolved& cfg = run.cfg;
  GridSpec g = cube_grid(cfg, dim);
  ns::SolverConfig sc = ns_solver(cfg, cfg.real("solver.T"));
  sc.keep_states = false;

  const std::string& kind = cfg.text("init.kind");
  const bool tg = kind == "taylor_green";
  SpectralField u0;
  if (tg) {
    if (dim != 2) throw config::ConfigError("init.kind = taylor_green is two-dimensional");
    u0 = taylor_green_2d(g, cfg.real("init.amplitude"));
  } else if (kind == "random") {
    u0 = random_solenoidal(g, to_int(cfg.integer("init.band"), "init.band"), cfg.real("init.l2"), run.seed);
  } else if (kind == "snapshot") {
    u0 = read_snapshot(fs::path(cfg.text("init.path"))).field;
    if (u0.grid().dim != dim) throw config::ConfigError("init.path: snapshot dimension mismatch");
    g = u0.grid();
  } else {
    throw config::ConfigError("init.kind: unknown value '" + kind + "'");
  }
  ns::validate_initial(u0);

  const std::size_t steps = sc.steps();
  const ns::Stepper stepper(g, sc);
  ns::Trajectory traj;
  traj.dt = sc.dt;
  traj.stride = sc.snapshot_stride;
  traj.lp_exponents = sc.diag_p;
  const bool snaps = cfg.boolean("output.snapshots");
  const bool duhamel = cfg.boolean("check.duhamel");
  std::optional<picard::DuhamelMonitor> mon;
  if (duhamel) mon.emplace(u0, sc.dt, sc.nu, sc.nonlinear);

  const double k = 2.0 * std::numbers::pi / g.periods[0];
  const double A = tg ? cfg.real("init.amplitude") : 0.0;
  double max_div = 0.0, max_rise = 0.0, tg_err = 0.0, tg_energy = 0.0;
  double e0 = 0.0;
  auto sample = [&](const SpectralField& u, double t) {
    const ns::DiagnosticsRow row = ns::compute_diagnostics(u, t, sc);
    if (traj.diagnostics.empty()) {
      e0 = row.energy;
    } else if (e0 > 0.0) {
      max_rise = std::max(max_rise, (row.energy - traj.diagnostics.back().energy) / e0);
    }
    max_div = std::max(max_div, row.div_resid);
    if (tg) {
      const SpectralField exact = taylor_green_2d(g, A * std::exp(-2.0 * sc.nu * k * k * t));
      const double ref = l2_norm(exact);
      tg_err = std::max(tg_err, ref > 0.0 ? l2_norm(u - exact) / ref : l2_norm(u));
      const double e_exact = e0 * std::exp(-4.0 * sc.nu * k * k * t);
      tg_energy = std::max(tg_energy, e_exact > 0.0 ? std::abs(row.energy - e_exact) / e_exact : row.energy);
    }
    if (snaps) write_snapshot(run.snapshot_path(sample_name(traj.times.size())), u);
    traj.times.push_back(t);
    traj.diagnostics.push_back(row);
  };

  SpectralField u = u0;
  sample(u, 0.0);
  if (mon) mon->push(u, 0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    stepper.advance(u, static_cast<double>(n - 1) * sc.dt);
    const double t = static_cast<double>(n) * sc.dt;
    if (mon) mon->push(u, t);
    if (n % static_cast<std::size_t>(sc.snapshot_stride) == 0 || n == steps) sample(u, t);
  }
  ns::write_diagnostics_csv(run.diagnostics(), traj);

  run.checks.push_back(check_le("energy_nonincreasing", max_rise, cfg.real("check.energy_tol"),
                                "largest relative energy increase between samples"));
  run.checks.push_back(check_le("divergence", max_div, cfg.real("check.div_tol"), "max relative spectral divergence"));
  if (mon) {
    run.checks.push_back(check_le("duhamel_residual", mon->finish(), cfg.real("check.duhamel_tol"),
                                  "max relative residual of the integral form"));
  }
  if (tg) {
    const double tol = cfg.real("check.exact_tol");
    run.checks.push_back(check_le("taylor_green_error", tg_err, tol, "max relative L2 error vs the exact solution"));
    run.checks.push_back(check_le("taylor_green_energy", tg_energy, tol, "max relative error vs E(0) e^{-4 nu k^2 t}"));
  }
  run.results = json{{"grid", grid_json(g)},
                     {"steps", steps},
                     {"samples", traj.times.size()},
                     {"final_energy", traj.diagnostics.back().energy}};
}

void run_planewave_check(Run& run) {
  const Resolved& cfg = run.cfg;
  const Rational c = cfg.rational("wave.c");
  const auto box = explicit_box(cfg);
  const GridSpec grid2 = profile_grid(cfg, c, box);
  const auto lattice = lattice_for(cfg, c, grid2, box);
  planewave::WaveProfile prof{make_profile(run, grid2, c, false), c};
  prof.h = ns::prepare_initial(prof.h);
  ns::SolverConfig sc = ns_solver(cfg, cfg.real("solver.T"));
  sc.keep_states = false;

  const ns::Trajectory t2 = ns::evolve(prof.h, sc);
  ns::write_diagnostics_csv(run.diagnostics(), t2);
  const double dist = planewave::commutation_check(prof, sc, lattice);
  run.checks.push_back(check_le("commutation", dist, cfg.real("check.tol"),
                                "max relative L2 distance between 3D evolution and embedded 2D evolution"));
  run.results = json{{"lattice", lattice_json(lattice)}, {"profile_l2", l2_norm(prof.h)}, {"distance", dist}};
}

void run_picard(Run& run) {
  const Resolved& cfg = run.cfg;
  const Rational c = cfg.rational("wave.c");
  const auto box = explicit_box(cfg);
  const GridSpec grid2 = profile_grid(cfg, c, box);
  const auto lattice = lattice_for(cfg, c, grid2, box);
  planewave::WaveProfile prof{ns::prepare_initial(make_profile(run, grid2, c, false)), c};

  picard::PicardConfig pc;
  pc.L = cfg.real("picard.L");
  pc.T_star = cfg.real("picard.T_star");
  pc.gammas = cfg.reals("picard.gammas");
  pc.holder_p = cfg.real("picard.holder_p");
  pc.max_iter = to_int(cfg.integer("picard.max_iter"), "picard.max_iter");
  pc.rel_tol = cfg.real("picard.rel_tol");
  pc.node_stride = to_int(cfg.integer("picard.node_stride"), "picard.node_stride");
  pc.eps = cfg.real("perturbation.eps");
  pc.validate();
  ns::SolverConfig sc = ns_solver(cfg, pc.T_star);
  sc.keep_states = true;
  sc.snapshot_stride = pc.node_stride;
  const std::size_t steps = sc.steps();

  const SpectralField v0 = experiments::scaled_perturbation(lattice.grid3, perturbation(cfg, lattice.grid3), pc.eps);
  planewave::PlaneWaveBackground bg(prof, lattice, sc, steps);
  const picard::PicardResult res = picard::picard_solve(v0, bg, pc, sc);
  planewave::PlaneWaveBackground bg2(prof, lattice, sc, steps);
  const ns::Trajectory direct = ns::evolve_perturbation(v0, bg2, sc);
  ns::write_diagnostics_csv(run.diagnostics(), direct);

  {
    std::ofstream it(run.out / "picard_iterations.csv");
    it << "n,K,K_grad,W,ratio,recurrence_rhs\n" << std::setprecision(17);
    for (const auto& r : res.report.iterations) {
      it << r.n << ',' << r.K << ',' << r.K_grad << ',' << r.W << ',' << r.ratio << ',' << r.recurrence_rhs << '\n';
    }
  }

  const int n_max = to_int(cfg.integer("check.ratio_iters"), "check.ratio_iters");
  double worst_ratio = 0.0;
  const auto& its = res.report.iterations;
  for (std::size_t i = 0; i + 1 < its.size(); ++i) {
    if (its[i].n >= 1 && its[i].n <= n_max) worst_ratio = std::max(worst_ratio, its[i].ratio);
  }
  double sup_diff = 0.0, sup_ref = 0.0;
  const auto& pt = res.trajectory;
  if (pt.times.size() != direct.times.size()) throw std::runtime_error("picard: node grids differ");
  for (std::size_t j = 0; j < direct.times.size(); ++j) {
    sup_diff = std::max(sup_diff, l2_norm(direct.states[j] - pt.states[j]));
    sup_ref = std::max(sup_ref, l2_norm(direct.states[j]));
  }
  const double match = sup_ref > 0.0 ? sup_diff / sup_ref : sup_diff;
  const double final_l3 = lp_norm(direct.states.back(), 3.0);
  const double factor = cfg.real("check.local_factor");

  run.checks.push_back(check_le("moderate_profile", res.report.M, cfg.real("check.m_bound_max"),
                                "sup_t ||phi||_inf + ||grad phi||_inf"));
  run.checks.push_back(check_le("picard_ratio", worst_ratio, cfg.real("check.ratio_bound"),
                                "max W_{n+1} / W_n for n = 1.." + std::to_string(n_max)));
  run.checks.push_back(Check{"picard_converged", res.report.converged, static_cast<double>(its.size()),
                             "converged", res.report.note});
  run.checks.push_back(check_le("picard_vs_stepping", match, cfg.real("check.match_tol"),
                                "relative sup-L2 distance between the fixed point and the stepped solution"));
  run.checks.push_back(check_le("local_bound", final_l3, factor * pc.eps, "||v(T_star)||_3"));
  json iters = json::array();
  for (const auto& r : its) {
    iters.push_back(json{{"n", r.n}, {"K", r.K}, {"K_grad", r.K_grad}, {"W", r.W}, {"ratio", r.ratio}});
  }
  run.results = json{{"lattice", lattice_json(lattice)},
                     {"L", res.report.L},
                     {"M", res.report.M},
                     {"v0_l3", res.report.v0_l3},
                     {"fitted_C", res.report.fitted_C},
                     {"converged", res.report.converged},
                     {"diverged", res.report.diverged},
                     {"note", res.report.note},
                     {"iterations", iters}};
}

void run_stability(Run& run) {
  const Resolved& cfg = run.cfg;
  const Rational c = cfg.rational("wave.c");
  const auto box = explicit_box(cfg);
  const GridSpec grid2 = profile_grid(cfg, c, box);
  const auto lattice = lattice_for(cfg, c, grid2, box);

  experiments::StabilityConfig sc;
  sc.prof0 = planewave::WaveProfile{ns::prepare_initial(make_profile(run, grid2, c, false)), c};
  sc.grid3 = lattice.grid3;
  sc.v0_spec = perturbation(cfg, lattice.grid3);
  sc.eps = cfg.real("stability.eps");
  sc.delta = cfg.real("stability.delta");
  sc.p_set = cfg.reals("stability.p_set");
  sc.T = cfg.real("stability.T");
  sc.solver = ns_solver(cfg, sc.T);
  sc.t_a = cfg.real("stability.t_a");
  sc.t_b = cfg.real("stability.t_b");
  sc.t_delta_max = cfg.real("stability.t_delta_max");
  sc.growth_abort = cfg.real("stability.growth_abort");
  const experiments::StabilityReport rep = experiments::stability_run(sc);
  ns::write_diagnostics_csv(run.diagnostics(), rep.v);

  run.checks.push_back(Check{"smallness", !rep.aborted, rep.v0_l3, "no abort", rep.note});
  experiments::DecayWindow w{rep.t_box, rep.t_a, rep.t_b, rep.window_decades, rep.degraded};
  if (!rep.aborted && rep.v0_l3 > 0.0) {
    decay_checks(run, sc.p_set, w, rep.fits, rep.envelopes, rep.accepted, sc.growth_abort);
  }
  json fits = json::array();
  for (const auto& f : rep.fits) fits.push_back(fit_json(f));
  json envs = json::array();
  for (const auto& e : rep.envelopes) {
    envs.push_back(json{{"p", number(e.p)}, {"sup", e.sup}, {"at_start", e.at_start}, {"bounded", e.bounded}});
  }
  run.results = json{{"lattice", lattice_json(lattice)},
                     {"t_delta", rep.t_delta},
                     {"profile_l2", rep.profile_l2},
                     {"v0_l3", rep.v0_l3},
                     {"window", window_json(w)},
                     {"aborted", rep.aborted},
                     {"note", rep.note},
                     {"fits", fits},
                     {"envelopes", envs}};
}

std::vector<std::array<double, 3>> heat_cases(const std::string& text) {
  std::vector<std::array<double, 3>> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto v = config::parse_real_list(item);
    if (v.empty()) continue;
    if (v.size() != 3) throw config::ConfigError("heat.cases: expected q,p,d triples, got '" + item + "'");
    out.push_back({v[0], v[1], v[2]});
  }
  if (out.empty()) throw config::ConfigError("heat.cases: no cases");
  return out;
}

void run_heatdecay(Run& run) {
  const Resolved& cfg = run.cfg;
  experiments::HeatEstimateOptions o;
  o.t_min = cfg.real("heat.t_min");
  o.t_max = cfg.real("heat.t_max");
  o.times_per_decade = to_int(cfg.integer("heat.times_per_decade"), "heat.times_per_decade");
  o.s2_min = cfg.real("heat.s2_min");
  o.s2_max = cfg.real("heat.s2_max");
  o.widths_per_decade = to_int(cfg.integer("heat.widths_per_decade"), "heat.widths_per_decade");
  o.fixed_s2 = cfg.real("heat.fixed_s2");
  const double tol = cfg.real("check.tol");
  std::ostream& csv = run.diagnostics();
  csv << "q,p,d,t,ratio_sup,ratio_fixed,grad_ratio_sup,grad_ratio_fixed\n" << std::setprecision(17);
  json cases = json::array();
  for (const auto& qc : heat_cases(cfg.text("heat.cases"))) {
    const int d = static_cast<int>(qc[2]);
    if (static_cast<double>(d) != qc[2]) throw config::ConfigError("heat.cases: d must be an integer");
    const auto rep = experiments::heat_estimate_check(qc[0], qc[1], d, o);
    const std::string p_tag = std::isinf(qc[1]) ? "inf" : config::format_real(qc[1]);
    for (const auto& r : rep.rows) {
      csv << config::format_real(qc[0]) << ',' << p_tag << ',' << d << ',' << r.t << ',' << r.ratio_sup << ','
          << r.ratio_fixed << ',' << r.grad_ratio_sup << ',' << r.grad_ratio_fixed << '\n';
    }
    const std::string tag = "(" + config::format_real(qc[0]) + "," + p_tag + "," + std::to_string(d) + ")";
    run.checks.push_back(Check{"flat" + tag, rep.bounded && rep.variation < tol, rep.variation, bound_le(tol),
                               "variation of the supremum ratio over the last decade"});
    run.checks.push_back(Check{"grad_flat" + tag, rep.bounded && rep.grad_variation < tol, rep.grad_variation,
                               bound_le(tol), "gradient analog"});
    cases.push_back(json{{"q", number(qc[0])},
                         {"p", number(qc[1])},
                         {"d", d},
                         {"exponent", rep.exponent},
                         {"grad_exponent", rep.grad_exponent},
                         {"max_ratio", rep.max_ratio},
                         {"max_grad_ratio", rep.max_grad_ratio},
                         {"variation", rep.variation},
                         {"grad_variation", rep.grad_variation},
                         {"bounded", rep.bounded}});
  }
  run.results = json{{"cases", cases}};
}

void run_contraction(Run& run) {
  const Resolved& cfg = run.cfg;
  const Rational c = cfg.rational("wave.c");
  const auto box = explicit_box(cfg);
  const GridSpec grid2 = profile_grid(cfg, c, box);
  const auto lattice = lattice_for(cfg, c, grid2, box);

  experiments::ContractionConfig cc;
  cc.prof0 = planewave::WaveProfile{ns::prepare_initial(make_profile(run, grid2, c, false)), c};
  cc.grid3 = lattice.grid3;
  cc.delta = cfg.real("contraction.delta");
  cc.early_start = cfg.boolean("contraction.early_start");
  cc.t_delta_max = cfg.real("contraction.t_delta_max");
  cc.M = cfg.real("contraction.M");
  cc.p_set = cfg.reals("contraction.p_set");
  cc.T = cfg.real("contraction.T");
  cc.solver = ns_solver(cfg, cc.T);
  cc.node_stride = to_int(cfg.integer("contraction.node_stride"), "contraction.node_stride");
  cc.pairs = to_int(cfg.integer("contraction.pairs"), "contraction.pairs");
  cc.band = to_int(cfg.integer("contraction.band"), "contraction.band");
  cc.seed = run.seed;
  cc.ratio_bound = cfg.real("contraction.ratio_bound");
  const auto rep = experiments::phi_contraction_check(cc);

  std::ostream& csv = run.diagnostics();
  csv << "pair,norm_v,norm_w,d_in,d_out,ratio\n" << std::setprecision(17);
  for (std::size_t i = 0; i < rep.pairs.size(); ++i) {
    const auto& p = rep.pairs[i];
    csv << i << ',' << p.norm_v << ',' << p.norm_w << ',' << p.d_in << ',' << p.d_out << ',' << p.ratio << '\n';
  }
  run.checks.push_back(check_le("lipschitz_ratio", rep.max_ratio, cc.ratio_bound, rep.note));
  run.results = json{{"lattice", lattice_json(lattice)}, {"t_delta", rep.t_delta}, {"profile_l2", rep.profile_l2},
                     {"phi_linf", rep.phi_linf},        {"M", rep.M},             {"pairs", rep.pairs.size()},
                     {"max_ratio", rep.max_ratio},      {"contraction", rep.contraction},
                     {"note", rep.note}};
}

void run_scan(Run& run) {
  const Resolved& cfg = run.cfg;
  experiments::KatoScanConfig kc;
  kc.grid3 = cube_grid(cfg, 3);
  kc.shape = perturbation(cfg, kc.grid3);
  kc.amplitudes = cfg.reals("scan.amplitudes");
  kc.solver = ns_solver(cfg, cfg.real("solver.T"));
  kc.transient_fraction = cfg.real("scan.transient_fraction");
  const auto rep = experiments::kato_smallness_scan(kc);

  std::ostream& csv = run.diagnostics();
  csv << "amplitude,t,envelope\n" << std::setprecision(17);
  json entries = json::array();
  for (const auto& e : rep.entries) {
    for (std::size_t i = 0; i < e.times.size(); ++i) csv << e.amplitude << ',' << e.times[i] << ',' << e.envelope[i] << '\n';
    entries.push_back(json{{"amplitude", e.amplitude},
                           {"l3", e.l3},
                           {"envelope_sup", e.envelope_sup},
                           {"envelope_final", e.envelope_final},
                           {"nonincreasing", e.nonincreasing},
                           {"completed", e.completed},
                           {"error", e.error}});
  }
  // Exploratory: only the smallest amplitude is asserted.
  if (!rep.entries.empty()) {
    const auto& first = rep.entries.front();
    run.checks.push_back(Check{"smallest_amplitude_bounded", first.bounded(), first.envelope_sup, "bounded",
                               "t^{1/2}||u||_inf nonincreasing after the transient"});
  }
  run.results = json{{"grid", grid_json(kc.grid3)}, {"frontier", rep.frontier}, {"entries", entries}};
}

void run_cgl_evolve(Run& run) {
  const Resolved& cfg = run.cfg;
  const auto dim = cfg.integer("grid.dim");
  if (dim != 2 && dim != 3) throw config::ConfigError("grid.dim must be 2 or 3");
  GridSpec g = cube_grid(cfg, static_cast<int>(dim));
  cgl::CGLConfig sc = cgl_solver(cfg, cfg.real("solver.T"));
  sc.keep_states = false;

  const std::string& kind = cfg.text("init.kind");
  const bool constant = kind == "constant";
  const Complex c0 = std::polar(cfg.real("init.amplitude"), cfg.real("init.phase"));
  SpectralField u0;
  if (constant) {
    u0 = SpectralField(g, 1, false);
    u0.at(0, 0) = c0;
  } else if (kind == "random") {
    u0 = random_scalar(g, to_int(cfg.integer("init.band"), "init.band"), cfg.real("init.l2"), run.seed, false);
  } else if (kind == "snapshot") {
    u0 = read_snapshot(fs::path(cfg.text("init.path"))).field;
    g = u0.grid();
  } else {
    throw config::ConfigError("init.kind: unknown value '" + kind + "'");
  }
  cgl::validate_cgl_field(u0);

  const std::size_t steps = sc.steps();
  const cgl::CglStepper stepper(g, sc);
  cgl::CglTrajectory traj;
  traj.dt = sc.dt;
  traj.stride = sc.snapshot_stride;
  traj.lp_exponents = sc.diag_p;
  const bool snaps = cfg.boolean("output.snapshots");
  double ode_err = 0.0;
  bool l2_decreasing = true;
  double prev_l2 = l2_norm(u0);
  const double r0 = std::abs(c0);
  auto sample = [&](const SpectralField& u, double t) {
    if (constant) {
      // rho' = -k rho^3, theta' = rho^2
      const double grow = 1.0 + 2.0 * sc.k * r0 * r0 * t;
      const Complex exact = std::polar(r0 / std::sqrt(grow), std::arg(c0) + std::log(grow) / (2.0 * sc.k));
      ode_err = std::max(ode_err, std::abs(u.at(0, 0) - exact) / std::max(std::abs(exact), 1e-300));
    }
    if (snaps) write_snapshot(run.snapshot_path(sample_name(traj.times.size())), u);
    traj.times.push_back(t);
    traj.diagnostics.push_back(cgl::cgl_diagnostics(u, t, sc));
  };
  SpectralField u = u0;
  sample(u, 0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    stepper.advance(u, static_cast<double>(n - 1) * sc.dt);
    const double l2 = l2_norm(u);
    if (prev_l2 > 0.0 && !(l2 < prev_l2)) l2_decreasing = false;
    prev_l2 = l2;
    if (n % static_cast<std::size_t>(sc.snapshot_stride) == 0 || n == steps) {
      sample(u, static_cast<double>(n) * sc.dt);
    }
  }
  cgl::write_cgl_csv(run.diagnostics(), traj);

  run.checks.push_back(Check{"l2_decreasing", l2_decreasing, l2_norm(u), "strictly decreasing",
                             "||u||_2 after every step"});
  json results{{"grid", grid_json(g)}, {"steps", steps}, {"final_l2", l2_norm(u)}};
  if (sc.snapshot_stride == 1 && traj.times.size() >= 7) {
    const auto rep = cgl::cgl_energy_identity_check(traj, sc);
    run.checks.push_back(check_le("energy_identity", rep.max_defect, cfg.real("check.energy_tol"), rep.note));
    results["energy_identity_note"] = rep.note;
  } else {
    results["energy_identity_note"] = "skipped: needs solver.stride = 1 and at least 7 samples";
  }
  if (constant) run.checks.push_back(check_le("constant_mode_ode", ode_err, cfg.real("check.ode_tol"), "relative"));
  run.results = results;
}

void run_cgl_planewave(Run& run) {
  const Resolved& cfg = run.cfg;
  const Rational c = cfg.rational("wave.c");
  const auto box = explicit_box(cfg);
  const GridSpec grid2 = profile_grid(cfg, c, box);
  const auto lattice = lattice_for(cfg, c, grid2, box);
  const SpectralField f0 = make_profile(run, grid2, c, true);
  cgl::CGLConfig sc = cgl_solver(cfg, cfg.real("solver.T"));
  sc.keep_states = false;
  const auto t2 = cgl::cgl_evolve(f0, sc);
  cgl::write_cgl_csv(run.diagnostics(), t2);
  const double dist = cgl::cgl_commutation_check(f0, sc, lattice);
  run.checks.push_back(check_le("commutation", dist, cfg.real("check.tol"),
                                "max relative L2 distance between 3D evolution and embedded 2D evolution"));
  run.results = json{{"lattice", lattice_json(lattice)}, {"profile_l2", l2_norm(f0)}, {"distance", dist}};
}

void run_cgl_stability(Run& run) {
  const Resolved& cfg = run.cfg;
  const Rational c = cfg.rational("wave.c");
  const auto box = explicit_box(cfg);
  const GridSpec grid2 = profile_grid(cfg, c, box);
  const auto lattice = lattice_for(cfg, c, grid2, box);

  cgl::CglStabilityConfig sc;
  sc.prof0 = make_profile(run, grid2, c, true);
  sc.c = c;
  sc.grid3 = lattice.grid3;
  sc.v0_spec = perturbation(cfg, lattice.grid3);
  sc.eps_v = cfg.real("stability.eps");
  sc.delta = cfg.real("stability.delta");
  sc.p_set = cfg.reals("stability.p_set");
  sc.T = cfg.real("stability.T");
  sc.solver = cgl_solver(cfg, sc.T);
  sc.t_a = cfg.real("stability.t_a");
  sc.t_b = cfg.real("stability.t_b");
  sc.t_delta_max = cfg.real("stability.t_delta_max");
  sc.growth_abort = cfg.real("stability.growth_abort");
  const auto rep = cgl::cgl_stability_run(sc);

  std::ostream& csv = run.diagnostics();
  csv << "t";
  for (double p : sc.p_set) csv << ",lp_p" << (std::isinf(p) ? std::string("inf") : config::format_real(p));
  csv << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    csv << rep.times[i];
    for (const auto& s : rep.v_lp) csv << ',' << s[i];
    csv << '\n';
  }

  run.checks.push_back(Check{"smallness", !rep.aborted, rep.v0_l3, "no abort", rep.note});
  if (!rep.aborted && rep.v0_l3 > 0.0) {
    decay_checks(run, sc.p_set, rep.window, rep.fits, rep.envelopes, rep.accepted, sc.growth_abort);
  }
  json penv = json::array();
  for (const auto& e : rep.profile_envelopes) {
    const std::string tag = std::isinf(e.p) ? "inf" : config::format_real(e.p);
    run.checks.push_back(Check{"profile_envelope_p" + tag, e.bounded, e.late_sup, "<= first-half sup",
                               "t^{1/2-1/p}||f||_p over the profile run"});
    penv.push_back(json{{"p", number(e.p)}, {"sup", e.sup}, {"late_sup", e.late_sup}, {"bounded", e.bounded}});
  }
  json fits = json::array();
  for (const auto& f : rep.fits) fits.push_back(fit_json(f));
  run.results = json{{"lattice", lattice_json(lattice)},
                     {"t_delta", rep.t_delta},
                     {"profile_l2", rep.profile_l2},
                     {"v0_l3", rep.v0_l3},
                     {"window", window_json(rep.window)},
                     {"aborted", rep.aborted},
                     {"note", rep.note},
                     {"fits", fits},
                     {"profile_envelopes", penv}};
}

using Runner = std::function<void(Run&)>;

const std::map<std::string, Runner>& runners() {
  static const std::map<std::string, Runner> m{
      {"simulate2d", [](Run& r) { run_simulate(r, 2); }},
      {"simulate3d", [](Run& r) { run_simulate(r, 3); }},
      {"planewave-check", run_planewave_check},
      {"picard", run_picard},
      {"stability", run_stability},
      {"heatdecay", run_heatdecay},
      {"contraction", run_contraction},
      {"scan", run_scan},
      {"cgl evolve", run_cgl_evolve},
      {"cgl planewave-check", run_cgl_planewave},
      {"cgl stability", run_cgl_stability},
  };
  return m;
}

std::string now_iso() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << '\n';
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks) {
    a.push_back(json{{"name", c.name}, {"passed", c.passed}, {"value", number(c.value)}, {"bound", c.bound},
                     {"detail", c.detail}});
  }
  return a;
}

}  // namespace

std::vector<std::string> commands() {
  std::vector<std::string> out;
  for (const auto& [name, schema] : schemas()) out.push_back(name);
  return out;
}

const Schema& schema_for(const std::string& command) {
  auto it = schemas().find(command);
  if (it == schemas().end()) throw config::ConfigError("unknown command '" + command + "'");
  return it->second;
}

std::string render_config(const Resolved& cfg) {
  std::string out;
  for (const auto& [key, value] : cfg.entries()) out += key + " = " + value + "\n";
  return out;
}

RunResult run(const RunOptions& opts, std::ostream* log) {
  RunResult result;
  if (opts.out.empty()) {
    result.status = "error";
    result.error = "no output directory";
    return result;
  }
  if (fs::exists(opts.out) && !fs::is_empty(opts.out)) {
    result.status = "error";
    result.error = "output directory '" + opts.out.string() + "' is not empty";
    return result;
  }
  fs::create_directories(opts.out);

  json summary{{"command", opts.command}};
  json manifest{{"tool", "pwlab"}, {"version", PWLAB_VERSION}, {"command", opts.command}};
  const fs::path manifest_path = opts.out / "manifest.json";
  try {
    if (opts.threads < 1) throw config::ConfigError("--threads must be >= 1");
    const Schema& schema = schema_for(opts.command);
    const config::RawConfig raw =
        opts.config.empty() ? config::parse_text(opts.config_text, "<inline>") : config::parse_file(opts.config);
    Resolved cfg = config::resolve(raw, schema);
    if (opts.seed) cfg.set("seed", std::to_string(*opts.seed));
    const auto seed = static_cast<std::uint64_t>(cfg.integer("seed"));

    manifest["config_path"] = opts.config.empty() ? std::string("<inline>") : opts.config.string();
    json resolved = json::object();
    for (const auto& [k, v] : cfg.entries()) resolved[k] = v;
    manifest["config"] = resolved;
    manifest["seed"] = seed;
    manifest["threads_requested"] = opts.threads;
    manifest["threads_used"] = 1;
    manifest["start_time"] = now_iso();
    manifest["end_time"] = nullptr;
    manifest["status"] = "running";
    manifest["outputs"] = json{{"manifest", "manifest.json"},     {"config", "config.resolved"},
                               {"diagnostics", "diagnostics.csv"}, {"summary", "summary.json"},
                               {"snapshots", "snapshots/"}};
    write_json(manifest_path, manifest);
    {
      std::ofstream rc(opts.out / "config.resolved");
      rc << render_config(cfg);
    }
    if (log) *log << "pwlab " << opts.command << ": running (seed " << seed << ")\n";

    Run run{cfg, opts.out, seed, {}, json::object(), {}};
    runners().at(opts.command)(run);
    if (!run.diag.is_open()) run.diagnostics();
    run.diag.close();

    const bool passed = std::all_of(run.checks.begin(), run.checks.end(), [](const Check& c) { return c.passed; });
    result.checks = run.checks;
    result.status = passed ? "passed" : "failed";
    result.exit_code = passed ? 0 : 1;
    summary["seed"] = seed;
    summary["status"] = result.status;
    summary["passed"] = passed;
    summary["checks"] = checks_json(run.checks);
    summary["results"] = run.results;
  } catch (const std::exception& e) {
    result.status = "error";
    result.exit_code = 2;
    result.error = e.what();
    summary["status"] = "error";
    summary["passed"] = false;
    summary["error"] = e.what();
    summary["checks"] = checks_json(result.checks);
  }
  write_json(opts.out / "summary.json", summary);
  if (manifest.contains("start_time")) {
    manifest["end_time"] = now_iso();
    manifest["status"] = result.status;
    manifest["exit_code"] = result.exit_code;
    if (!result.error.empty()) manifest["error"] = result.error;
    write_json(manifest_path, manifest);
  } else {
    manifest["status"] = "error";
    manifest["exit_code"] = result.exit_code;
    manifest["error"] = result.error;
    write_json(manifest_path, manifest);
  }
  if (log) {
    for (const auto& c : result.checks) {
      *log << (c.passed ? "PASS " : "FAIL ") << c.name << " = " << config::format_real(c.value) << " (" << c.bound
           << ")\n";
    }
    if (!result.error.empty()) *log << "ERROR " << result.error << '\n';
    *log << "status: " << result.status << '\n';
  }
  return result;
}

}  // namespace pwlab::cli
