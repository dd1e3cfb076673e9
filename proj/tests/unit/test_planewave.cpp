#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pwlab/initial_data.hpp"
#include "pwlab/planewave.hpp"

using namespace pwlab;
using namespace pwlab::planewave;

namespace {

SpectralField random_profile(const GridSpec& g, std::uint64_t seed, bool solenoidal = true) {
  SpectralField h = random_solenoidal(g, 4, 1.0, seed);
  if (!solenoidal) h += gradient(random_scalar(g, 4, 0.5, seed + 1));
  return h;
}

double rel(const SpectralField& a, const SpectralField& b) {
  const double n = l2_norm(b);
  return l2_norm(a - b) / (n > 0.0 ? n : 1.0);
}

const GridSpec kProfileGrid = GridSpec::box({16, 16}, {kTwoPi, kTwoPi});

}  // namespace

TEST_CASE("lattice construction") {
  auto lat = PlaneWaveLattice::standard(Rational::make(1, 2), kProfileGrid);
  CHECK(lat.p == 1);
  CHECK(lat.q == 1);
  const double s = std::sqrt(1.25);
  CHECK(lat.grid3.periods[0] == doctest::Approx(s * kTwoPi));
  CHECK(lat.grid3.periods[1] == doctest::Approx(2.0 * s * kTwoPi));

  // c = 1/3 on a cube: L_x = 2 pi is not an integer multiple of sqrt(10)/3 * Lambda.
  GridSpec cube = GridSpec::cube(3, 16);
  CHECK_THROWS_WITH_AS(PlaneWaveLattice::make(Rational::make(1, 3), kProfileGrid, cube),
                       doctest::Contains("commensurability rule"), std::invalid_argument);

  // A doubled box with p = 2, q = 2 maps (a, b) to (2a, -2a, b).
  GridSpec big = GridSpec::box({32, 32, 16}, {2 * s * kTwoPi, 4 * s * kTwoPi, kTwoPi});
  auto lat2 = PlaneWaveLattice::make(Rational::make(1, 2), kProfileGrid, big);
  CHECK(lat2.p == 2);
  CHECK(lat2.q == 2);
  GridSpec coarse = GridSpec::box({16, 16, 16}, {2 * s * kTwoPi, 4 * s * kTwoPi, kTwoPi});
  CHECK_THROWS_AS(PlaneWaveLattice::make(Rational::make(1, 2), kProfileGrid, coarse), std::invalid_argument);
}

TEST_CASE("embedding with c = 0") {
  auto lat = PlaneWaveLattice::standard(Rational::make(0, 1), kProfileGrid, 3.0, 8);
  SpectralField h = random_profile(kProfileGrid, 3);
  SpectralField phi = embed_W({h, Rational::make(0, 1)}, lat);
  PhysicalField p3 = to_physical(phi);
  PhysicalField p2 = to_physical(h);
  double err = 0.0;
  for (int ix = 0; ix < 16; ++ix) {
    for (int iy = 0; iy < 8; ++iy) {
      for (int iz = 0; iz < 16; ++iz) {
        const std::size_t i3 = (static_cast<std::size_t>(ix) * 8 + iy) * 16 + iz;
        const std::size_t i2 = static_cast<std::size_t>(ix) * 16 + iz;
        err = std::max(err, std::abs(p3.component(0)[i3] - p2.component(0)[i2]));
        err = std::max(err, std::abs(p3.component(1)[i3]));
        err = std::max(err, std::abs(p3.component(2)[i3] - p2.component(1)[i2]));
      }
    }
  }
  CHECK(err < 1e-14);
}

TEST_CASE("embedding coefficients and divergence") {
  auto lat = PlaneWaveLattice::standard(Rational::make(1, 1), kProfileGrid);
  SpectralField h = single_mode(kProfileGrid, {1, 2, 0}, {Complex(0.6, 0.2), Complex(-0.3), Complex(0.0)}, 2);
  SpectralField phi = embed_W({h, Rational::make(1, 1)}, lat);
  const std::size_t m2 = static_cast<std::size_t>(kProfileGrid.index_of_mode(0, 1)) * 16 + 2;
  const std::size_t m3 = (1 * 16 + 15) * 16 + 2;  // (1, -1, 2)
  CHECK(std::abs(phi.at(0, m3) - h.at(0, m2) / std::sqrt(2.0)) < 1e-16);
  CHECK(std::abs(phi.at(1, m3) + h.at(0, m2) / std::sqrt(2.0)) < 1e-16);
  CHECK(std::abs(phi.at(2, m3) - h.at(1, m2)) < 1e-16);

  for (auto c : {Rational::make(0, 1), Rational::make(1, 1), Rational::make(1, 2), Rational::make(-2, 3)}) {
    auto l = PlaneWaveLattice::standard(c, kProfileGrid);
    SpectralField g = random_profile(kProfileGrid, 7, false);
    SpectralField e = embed_W({g, c}, l);
    CHECK(max_coeff_diff(divergence(e), embed_scalar(divergence(g), l)) < 1e-13);
    SpectralField sol = embed_W({random_profile(kProfileGrid, 8), c}, l);
    CHECK(lp_norm(to_physical(divergence(sol)), kInf) < 1e-13);
  }
}

TEST_CASE("extraction") {
  for (auto c : {Rational::make(0, 1), Rational::make(1, 1), Rational::make(1, 2)}) {
    auto lat = PlaneWaveLattice::standard(c, kProfileGrid);
    SpectralField h = random_profile(kProfileGrid, 11, false);
    WaveProfile back = extract_profile(embed_W({h, c}, lat), lat);
    CHECK(max_coeff_diff(back.h, h) < 1e-13);
    WaveProfile viagrid = extract_profile(embed_W({h, c}, lat), c);
    CHECK(max_coeff_diff(viagrid.h, h) < 1e-13);
  }
  auto lat = PlaneWaveLattice::standard(Rational::make(1, 2), kProfileGrid);
  SpectralField generic = random_solenoidal(lat.grid3, 5, 1.0, 12);
  const double frac = off_lattice_fraction(generic, lat);
  CHECK(frac > 0.9);
  try {
    extract_profile(generic, lat);
    FAIL("expected NotAPlaneWave");
  } catch (const NotAPlaneWave& e) {
    CHECK(e.fraction() == doctest::Approx(frac));
  }

  // c = 0, phi = (a(x,z), 0, b(x,z)) -> h = (a, b).
  auto lat0 = PlaneWaveLattice::standard(Rational::make(0, 1), kProfileGrid);
  SpectralField a = random_scalar(kProfileGrid, 4, 1.0, 13);
  SpectralField b = random_scalar(kProfileGrid, 4, 1.0, 14);
  SpectralField phi(lat0.grid3, 3);
  SpectralField ea = embed_scalar(a, lat0);
  SpectralField eb = embed_scalar(b, lat0);
  for (std::size_t k = 0; k < phi.modes(); ++k) {
    phi.at(0, k) = ea.at(0, k);
    phi.at(2, k) = eb.at(0, k);
  }
  WaveProfile ab = extract_profile(phi, lat0);
  CHECK(max_coeff_diff(ab.h, [&] {
          SpectralField s(kProfileGrid, 2);
          for (std::size_t k = 0; k < s.modes(); ++k) {
            s.at(0, k) = a.at(0, k);
            s.at(1, k) = b.at(0, k);
          }
          return s;
        }()) < 1e-15);
}

TEST_CASE("change of variables") {
  const double lxi = 1.3 * kTwoPi;
  GridSpec gxi = GridSpec::box({16, 16}, {lxi, kTwoPi});
  auto g1 = [&](double xi, double z) { return std::sin(kTwoPi * xi / lxi) * std::cos(z) + 0.3 * std::cos(2 * kTwoPi * xi / lxi + z); };
  auto g3 = [&](double xi, double z) { return 0.5 * std::cos(kTwoPi * xi / lxi) * std::sin(2 * z); };

  SUBCASE("c = 0 keeps g1 and g3") {
    SpectralField g = sample(gxi, 3, [&](std::span<const double> x, std::span<double> out) {
      out[0] = g1(x[0], x[1]);
      out[1] = 0.7 * g3(x[0], x[1]);
      out[2] = g3(x[0], x[1]);
    });
    WaveProfile h = change_of_variables_g_to_h(g, Rational::make(0, 1));
    CHECK(h.h.grid().periods[0] == lxi);
    for (std::size_t k = 0; k < g.modes(); ++k) {
      CHECK(h.h.at(0, k) == g.at(0, k));
      CHECK(h.h.at(1, k) == g.at(2, k));
    }
  }
  SUBCASE("g1 = c g2 cancels") {
    const double c = 0.5;
    SpectralField g = sample(gxi, 3, [&](std::span<const double> x, std::span<double> out) {
      out[0] = c * g1(x[0], x[1]);
      out[1] = g1(x[0], x[1]);
      out[2] = g3(x[0], x[1]);
    });
    WaveProfile h = change_of_variables_g_to_h(g, Rational::make(1, 2));
    double m = 0.0;
    for (std::size_t k = 0; k < g.modes(); ++k) m = std::max(m, std::abs(h.h.at(0, k)));
    CHECK(m < 1e-16);
  }
  SUBCASE("slaved profile reproduces the sampled 3D plane wave") {
    const Rational c = Rational::make(1, 2);
    const double cv = c.value();
    SpectralField g = sample(gxi, 3, [&](std::span<const double> x, std::span<double> out) {
      out[0] = g1(x[0], x[1]);
      out[1] = -cv * g1(x[0], x[1]);
      out[2] = g3(x[0], x[1]);
    });
    WaveProfile h = change_of_variables_g_to_h(g, c);
    auto lat = PlaneWaveLattice::standard(c, h.h.grid());
    SpectralField direct = sample(lat.grid3, 3, [&](std::span<const double> x, std::span<double> out) {
      const double xi = x[0] - cv * x[1];
      out[0] = g1(xi, x[2]);
      out[1] = -cv * g1(xi, x[2]);
      out[2] = g3(xi, x[2]);
    });
    CHECK(max_coeff_diff(embed_W(h, lat), direct) < 1e-13);
  }
}

TEST_CASE("X_c^s decomposition") {
  auto lat = PlaneWaveLattice::standard(Rational::make(1, 2), kProfileGrid);
  const Rational c = lat.c;
  SpectralField sol = random_profile(kProfileGrid, 21);
  auto d0 = decompose_Xcs(embed_W({sol, c}, lat), lat);
  CHECK(l2_norm(d0.potential) < 1e-14);

  SpectralField psi = random_scalar(kProfileGrid, 4, 1.0, 22);
  auto d1 = decompose_Xcs(embed_W({gradient(psi), c}, lat), lat);
  CHECK(l2_norm(d1.solenoidal_profile.h) < 1e-14);
  CHECK(max_coeff_diff(d1.potential, psi) < 1e-14);

  // Two modes by hand: h = (0, s) e^{i w} + grad(psi e^{2 i z}), psi = 0.4 - 0.1 i.
  SpectralField mixed(kProfileGrid, 2);
  const std::size_t kw = static_cast<std::size_t>(1) * 16;
  const std::size_t kwm = static_cast<std::size_t>(15) * 16;
  const std::size_t kz = 2;
  const std::size_t kzm = 14;
  const Complex sv(0.25, 0.5);
  const Complex pv(0.4, -0.1);
  mixed.at(1, kw) = sv;
  mixed.at(1, kwm) = std::conj(sv);
  mixed.at(1, kz) = Complex(0.0, 2.0) * pv;
  mixed.at(1, kzm) = std::conj(Complex(0.0, 2.0) * pv);
  auto d2 = decompose_Xcs(embed_W({mixed, c}, lat), lat);
  CHECK(std::abs(d2.potential.at(0, kz) - pv) < 1e-13);
  CHECK(std::abs(d2.potential.at(0, kw)) < 1e-13);
  CHECK(std::abs(d2.solenoidal_profile.h.at(1, kw) - sv) < 1e-13);
  CHECK(std::abs(d2.solenoidal_profile.h.at(1, kz)) < 1e-13);

  SpectralField generic = random_profile(kProfileGrid, 23, false);
  SpectralField phi = embed_W({generic, c}, lat);
  CHECK(max_coeff_diff(recompose_Xcs(decompose_Xcs(phi, lat), lat), phi) < 1e-13);
}

TEST_CASE("embedding identities") {
  for (auto c : {Rational::make(0, 1), Rational::make(1, 1), Rational::make(1, 2)}) {
    auto lat = PlaneWaveLattice::standard(c, kProfileGrid);
    SpectralField h = random_profile(kProfileGrid, 31, false);
    SpectralField g = random_profile(kProfileGrid, 32, false);
    SpectralField lin = embed_W({2.0 * h + (-3.0) * g, c}, lat);
    SpectralField sep = 2.0 * embed_W({h, c}, lat) + (-3.0) * embed_W({g, c}, lat);
    CHECK(max_coeff_diff(lin, sep) < 1e-15);
    const double n3 = l2_norm(embed_W({h, c}, lat));
    const double n2 = l2_norm(h);
    CHECK(std::abs(n3 * n3 - lat.transverse_length() * n2 * n2) < 1e-12 * n3 * n3);
    CHECK(max_coeff_diff(leray_project(embed_W({h, c}, lat)), embed_W({leray_project(h), c}, lat)) < 1e-13);
  }
}

TEST_CASE("commutation and profile decay") {
  ns::SolverConfig cfg;
  cfg.dt = 5e-3;
  cfg.T = 0.1;
  cfg.snapshot_stride = 5;
  auto lat = PlaneWaveLattice::standard(Rational::make(1, 1), kProfileGrid);
  CHECK(commutation_check({SpectralField(kProfileGrid, 2), lat.c}, cfg, lat) == 0.0);
  SpectralField single = leray_project(single_mode(kProfileGrid, {1, 1, 0}, {Complex(1.0), Complex(-1.0), 0.0}, 2));
  CHECK(commutation_check({single, lat.c}, cfg, lat) < 1e-13);
  auto lat2 = PlaneWaveLattice::standard(Rational::make(1, 2), kProfileGrid);
  SpectralField r = random_profile(kProfileGrid, 41);
  CHECK(commutation_check({r, lat2.c}, cfg, lat2) < 1e-12);

  ns::SolverConfig dcfg;
  dcfg.dt = 0.01;
  dcfg.T = 1.0;
  dcfg.snapshot_stride = 10;
  GridSpec tgg = GridSpec::cube(2, 32);
  SpectralField tg = taylor_green_2d(tgg);
  const double delta = 0.3 * l2_norm(tg);
  DecayReport rep = profile_l2_decay_check({tg, Rational::make(0, 1)}, dcfg, delta);
  CHECK(rep.monotone);
  REQUIRE(rep.t0.has_value());
  CHECK(*rep.t0 == doctest::Approx(std::log(l2_norm(tg) / delta) / 2.0).epsilon(1e-10));
  CHECK(rep.envelope_ratio > 0.0);

  DecayReport z = profile_l2_decay_check({SpectralField(tgg, 2), Rational::make(0, 1)}, dcfg, 1e-3);
  REQUIRE(z.t0.has_value());
  CHECK(*z.t0 == 0.0);

  DecayReport rr = profile_l2_decay_check({random_solenoidal(tgg, 6, 3.0, 42), Rational::make(0, 1)}, dcfg, 0.1);
  CHECK(rr.monotone);
}

TEST_CASE("plane wave background matches the dense 3D run") {
  ns::SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.T = 0.1;
  auto lat = PlaneWaveLattice::standard(Rational::make(1, 2), kProfileGrid);
  WaveProfile prof{random_profile(kProfileGrid, 51), lat.c};
  PlaneWaveBackground pw(prof, lat, cfg, cfg.steps());
  ns::SolverConfig dense = cfg;
  dense.dense_output = true;
  ns::Trajectory full = ns::evolve(embed_W(prof, lat), dense);
  ns::DenseBackground db(full);
  double worst = 0.0;
  for (std::size_t n = 0; n < cfg.steps(); ++n) {
    for (int s = 0; s < 4; ++s) {
      const PhysicalField& a = pw.stage(n, s);
      const PhysicalField& b = db.stage(n, s);
      for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
    }
  }
  CHECK(worst < 1e-13);
  CHECK(max_coeff_diff(pw.state(cfg.steps()), full.final_state()) < 1e-13);

  SpectralField v0 = random_solenoidal(lat.grid3, 4, 0.5, 52);
  ns::Trajectory va = ns::evolve_perturbation(v0, pw, cfg);
  ns::Trajectory vb = ns::evolve_perturbation(v0, full, cfg);
  CHECK(max_coeff_diff(va.final_state(), vb.final_state()) < 1e-13);
}
