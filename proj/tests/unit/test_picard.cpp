#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pwlab/initial_data.hpp"
#include "pwlab/picard.hpp"

using namespace pwlab;

namespace {

// Grid quadrature of |cos x|^p over [0, 2 pi) with n points, divided by 2 pi.
double cos_moment(double p, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += std::pow(std::abs(std::cos(2.0 * std::numbers::pi * i / n)), p);
  return s / n;
}

}  // namespace

TEST_CASE("weighted norms") {
  GridSpec g = GridSpec::cube(3, 16);
  ns::Trajectory traj;
  const SpectralField f = single_mode(g, {1, 0, 0}, {Complex(0.0), Complex(1.0), Complex(0.0)}, 3);  // (0, cos x, 0)
  for (int j = 0; j <= 10; ++j) {
    traj.times.push_back(0.05 * j);
    traj.states.push_back(f);
  }
  const double V = g.volume();
  const double L = 3.0;
  for (double gamma : {0.25, 0.5, 1.0}) {
    const double p = 3.0 / gamma;
    const double norm = std::pow(V * cos_moment(p, 16), 1.0 / p);
    double expect = 0.0;
    for (int j = 0; j <= 10; ++j) {
      const double t = 0.05 * j;
      if (t == 0.0 && gamma < 1.0) continue;
      expect = std::max(expect, std::exp(-L * t) * std::pow(t, 0.5 * (1.0 - gamma)) * norm);
    }
    CHECK(std::abs(picard::weighted_norm(traj, gamma, L) - expect) < 1e-12 * expect);
  }
  CHECK(picard::weighted_norm(traj, 1.0, 0.0) == doctest::Approx(lp_norm(f, 3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(picard::weighted_norm(traj, 0.0, L), std::invalid_argument);
  CHECK_THROWS_AS(picard::weighted_norm(traj, 1.5, L), std::invalid_argument);

  ns::Trajectory zero;
  zero.times = {0.0, 0.1};
  zero.states = {SpectralField(g, 3), SpectralField(g, 3)};
  CHECK(picard::weighted_norm(zero, 0.5, L) == 0.0);
  CHECK(picard::gradient_weighted_norm(zero, L) == 0.0);
}

TEST_CASE("duhamel residual") {
  GridSpec g = GridSpec::cube(2, 64);
  ns::SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 0.2;

  ns::SolverConfig heat = cfg;
  heat.nonlinear = false;
  SpectralField r0 = random_solenoidal(g, 10, 1.0, 17);
  ns::Trajectory ht = ns::evolve(r0, heat);
  CHECK(picard::duhamel_residual(ht, r0, 1.0, false) <= 1e-12);

  ns::Trajectory tg = ns::evolve(taylor_green_2d(g), cfg);
  CHECK(picard::duhamel_residual(tg, taylor_green_2d(g)) <= 1e-8);

  SpectralField u0 = random_solenoidal(g, 10, 2.0, 18);
  ns::Trajectory rt = ns::evolve(u0, cfg);
  CHECK(picard::duhamel_residual(rt, u0) <= 1e-6);

  ns::Trajectory bad = rt;
  bad.states[7] *= 1.01;
  CHECK(picard::duhamel_residual(bad, u0) > 1e-3);

  picard::DuhamelMonitor mon(u0, cfg.dt);
  for (std::size_t j = 0; j < rt.times.size(); ++j) mon.push(rt.states[j], rt.times[j]);
  CHECK(mon.finish() == picard::duhamel_residual(rt, u0));
  CHECK_THROWS(mon.push(u0, 1.0));

  picard::DuhamelMonitor two(u0, cfg.dt);
  ns::Trajectory head = rt;
  head.times.resize(2);
  head.states.resize(2);
  two.push(rt.states[0], 0.0);
  two.push(rt.states[1], cfg.dt);
  CHECK(two.finish() == picard::duhamel_residual(head, u0));

  picard::DuhamelMonitor skew(u0, cfg.dt);
  skew.push(u0, 0.0);
  CHECK_THROWS_AS(skew.push(u0, 3.0 * cfg.dt), std::invalid_argument);
}

TEST_CASE("picard iteration") {
  GridSpec g = GridSpec::cube(3, 16);
  ns::SolverConfig cfg;
  cfg.dt = 5e-3;
  cfg.T = 0.5;
  ns::SolverConfig dense = cfg;
  dense.dense_output = true;
  ns::Trajectory phi = ns::evolve(random_solenoidal(g, 3, 4.0, 5), dense);

  picard::PicardConfig pcfg;
  pcfg.T_star = 0.5;
  pcfg.max_iter = 10;

  auto zero = picard::picard_solve(SpectralField(g, 3), phi, pcfg, cfg);
  CHECK(zero.report.converged);
  for (const auto& it : zero.report.iterations) CHECK(it.W == 0.0);

  SpectralField v0 = random_solenoidal(g, 4, 0.2, 6);
  auto res = picard::picard_solve(v0, phi, pcfg, cfg);
  CHECK(res.report.M > 0.0);
  CHECK(res.report.L == doctest::Approx(4.0 * res.report.M * 1.5));
  CHECK(!res.report.diverged);
  REQUIRE(res.report.iterations.size() >= 5);
  for (std::size_t i = 0; i + 1 < res.report.iterations.size(); ++i) {
    const auto& it = res.report.iterations[i];
    CHECK(it.ratio <= 0.6);
    CHECK(std::isfinite(it.K));
    CHECK(res.report.iterations[i + 1].K <= res.report.fitted_C * it.recurrence_rhs * (1 + 1e-12));
  }

  ns::Trajectory direct = ns::evolve_perturbation(v0, phi, cfg);
  double sup_diff = 0.0;
  double sup_ref = 0.0;
  for (std::size_t j = 0; j < direct.times.size(); ++j) {
    sup_diff = std::max(sup_diff, l2_norm(direct.states[j] - res.trajectory.states[j]));
    sup_ref = std::max(sup_ref, l2_norm(direct.states[j]));
  }
  MESSAGE("picard vs stepping: " << sup_diff / sup_ref);
  CHECK(sup_diff / sup_ref < 1e-6);
}
