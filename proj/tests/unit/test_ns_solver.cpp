#include <doctest.h>

#include <cmath>
#include <sstream>

#include "pwlab/initial_data.hpp"
#include "pwlab/ns_solver.hpp"

using namespace pwlab;

namespace {

SpectralField tg_exact(const GridSpec& g, double t) {
  SpectralField u = taylor_green_2d(g);
  u *= std::exp(-2.0 * t);
  return u;
}

}  // namespace

TEST_CASE("solver config validation") {
  ns::SolverConfig cfg;
  cfg.dt = 0.1;
  cfg.T = 1.0;
  CHECK(cfg.steps() == 10);
  cfg.T = 1.05;
  CHECK_THROWS_AS(cfg.steps(), std::invalid_argument);
  cfg.T = 1.0;
  cfg.nu = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("single steps") {
  GridSpec g = GridSpec::cube(2, 32);
  ns::SolverConfig cfg;
  cfg.dt = 1e-3;
  SpectralField zero(g, 2);
  CHECK(l2_norm(ns::step(zero, cfg)) == 0.0);

  SpectralField u1 = ns::step(taylor_green_2d(g), cfg);
  CHECK(l2_norm(u1 - tg_exact(g, 1e-3)) / l2_norm(tg_exact(g, 1e-3)) < 1e-12);

  SpectralField bad = taylor_green_2d(g);
  bad.at(1, 1) += 1.0;  // k = (0, 1): adds a compressive y-component
  CHECK_THROWS_AS(ns::step(bad, cfg), std::invalid_argument);
}

TEST_CASE("step is consistent with the differential equation") {
  GridSpec g = GridSpec::cube(3, 16);
  SpectralField u = leray_project(single_mode(g, {1, 2, 0}, {Complex(1.0), Complex(-0.5), Complex(0.7)}, 3));
  u += leray_project(single_mode(g, {0, 1, 1}, {Complex(0.3, 0.2), Complex(0.5), Complex(-0.5)}, 3));
  const SpectralField exact_rate = laplacian(u) - nonlinear_term(u);
  double prev = 0.0;
  for (double dt : {1e-2, 5e-3}) {
    ns::SolverConfig cfg;
    cfg.dt = dt;
    SpectralField rate = ns::step(u, cfg) - u;
    rate *= 1.0 / dt;
    const double err = l2_norm(rate - exact_rate);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(2.0).epsilon(0.05));
    prev = err;
  }
}

TEST_CASE("taylor green evolution") {
  GridSpec g = GridSpec::cube(2, 64);
  ns::SolverConfig cfg;
  cfg.dt = 1e-3;
  cfg.T = 0.2;
  cfg.snapshot_stride = 20;
  ns::Trajectory traj = ns::evolve(taylor_green_2d(g), cfg);
  REQUIRE(traj.times.size() == 11);
  const double e0 = traj.diagnostics.front().energy;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const double t = traj.times[i];
    CHECK(traj.diagnostics[i].energy == doctest::Approx(e0 * std::exp(-4.0 * t)).epsilon(1e-12));
    CHECK(l2_norm(traj.states[i] - tg_exact(g, t)) < 1e-12);
  }
  CHECK(traj.times.back() == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("zero data and energy decay") {
  GridSpec g = GridSpec::cube(2, 32);
  ns::SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.T = 0.5;
  ns::Trajectory z = ns::evolve(SpectralField(g, 2), cfg);
  for (const auto& s : z.states) CHECK(l2_norm(s) == 0.0);

  ns::Trajectory r = ns::evolve(random_solenoidal(g, 6, 2.0, 3), cfg);
  for (std::size_t i = 1; i < r.diagnostics.size(); ++i) {
    CHECK(r.diagnostics[i].energy < r.diagnostics[i - 1].energy);
    CHECK(r.diagnostics[i].div_resid < 1e-12);
  }
}

TEST_CASE("cfl and non-finite states abort") {
  GridSpec g = GridSpec::cube(2, 32);
  ns::SolverConfig cfg;
  cfg.dt = 0.5;
  cfg.T = 1.0;
  SpectralField u = random_solenoidal(g, 6, 50.0, 5);
  CHECK_THROWS_AS(ns::evolve(u, cfg), ns::SolverError);
  try {
    ns::evolve(u, cfg);
  } catch (const ns::SolverError& e) {
    CHECK(e.time() == 0.0);
    CHECK(std::string(e.what()).find("CFL") != std::string::npos);
  }
  SpectralField nan = taylor_green_2d(g);
  nan.at(0, 5) = Complex(std::nan(""), 0.0);
  cfg.dt = 1e-3;
  cfg.T = 1e-3;
  CHECK_THROWS(ns::evolve(nan, cfg));
}

TEST_CASE("perturbation evolution and composition") {
  GridSpec g = GridSpec::cube(3, 32);
  ns::SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 0.25;
  cfg.snapshot_stride = 5;
  SpectralField phi0 = random_solenoidal(g, 4, 3.0, 101);
  SpectralField v0 = random_solenoidal(g, 6, 1.0, 102);

  ns::SolverConfig dense = cfg;
  dense.dense_output = true;
  ns::Trajectory phi = ns::evolve(phi0, dense);
  ns::Trajectory full = ns::evolve(phi0 + v0, cfg);
  ns::Trajectory v = ns::evolve_perturbation(v0, phi, cfg);
  REQUIRE(v.times.size() == full.times.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < v.times.size(); ++i) {
    worst = std::max(worst, l2_norm(full.states[i] - phi.states[i] - v.states[i]) / l2_norm(full.states[i]));
  }
  CHECK(worst < 1e-8);

  ns::Trajectory zero = ns::evolve_perturbation(SpectralField(g, 3), phi, cfg);
  for (const auto& s : zero.states) CHECK(l2_norm(s) == 0.0);

  ns::Trajectory still = ns::evolve(SpectralField(g, 3), dense);
  ns::Trajectory alone = ns::evolve_perturbation(v0, still, cfg);
  ns::Trajectory direct = ns::evolve(v0, cfg);
  CHECK(max_coeff_diff(alone.final_state(), direct.final_state()) < 1e-14);

  ns::SolverConfig longer = cfg;
  longer.T = 0.5;
  CHECK_THROWS_AS(ns::evolve_perturbation(v0, phi, longer), std::invalid_argument);
}

TEST_CASE("perturbation rhs") {
  GridSpec g = GridSpec::cube(3, 16);
  SpectralField v = random_solenoidal(g, 4, 1.0, 7);
  SpectralField phi = random_solenoidal(g, 4, 1.0, 8);
  CHECK(l2_norm(ns::perturbation_rhs(SpectralField(g, 3), phi)) == 0.0);
  CHECK(max_coeff_diff(ns::perturbation_rhs(v, SpectralField(g, 3)), nonlinear_term(v)) < 1e-12);
}

TEST_CASE("diagnostics csv") {
  GridSpec g = GridSpec::cube(2, 16);
  ns::SolverConfig cfg;
  cfg.dt = 0.05;
  cfg.T = 0.1;
  ns::Trajectory traj = ns::evolve(taylor_green_2d(g), cfg);
  std::ostringstream os;
  ns::write_diagnostics_csv(os, traj);
  std::istringstream is(os.str());
  std::string header;
  std::getline(is, header);
  CHECK(header == "t,lp_p3,lp_p6,lp_pinf,hs,energy,div_resid,M_bound");
  std::string row;
  int rows = 0;
  while (std::getline(is, row)) ++rows;
  CHECK(rows == 3);
  // ||u||_inf = 1 and ||grad u||_inf = sqrt(2) for Taylor-Green at t = 0.
  CHECK(traj.diagnostics[0].m_bound == doctest::Approx(1.0 + std::sqrt(2.0)).epsilon(1e-12));
}
