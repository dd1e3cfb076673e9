#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "pwlab/initial_data.hpp"
#include "pwlab/operators.hpp"
#include "pwlab/rational.hpp"
#include "pwlab/snapshot.hpp"
#include "pwlab/spectral_context.hpp"

using namespace pwlab;

namespace {

double rel_diff(const SpectralField& a, const SpectralField& b) {
  const double n = l2_norm(b);
  return l2_norm(a - b) / (n > 0.0 ? n : 1.0);
}

std::size_t mode_index(const GridSpec& g, std::array<int, 3> m) {
  std::size_t f = 0;
  for (int a = 0; a < g.dim; ++a) f = f * static_cast<std::size_t>(g.points[a]) + static_cast<std::size_t>(g.index_of_mode(a, m[a]));
  return f;
}

SpectralField random_vector(const GridSpec& g, int band, std::uint64_t seed) {
  // Generic (not solenoidal) real vector field: solenoidal part plus a gradient.
  SpectralField f = random_solenoidal(g, band, 1.0, seed);
  SpectralField psi = random_scalar(g, band, 1.0, seed + 1);
  f += gradient(psi);
  return f;
}

}  // namespace

TEST_CASE("grid validation") {
  CHECK_NOTHROW(GridSpec::cube(3, 48));
  CHECK_THROWS_AS(GridSpec::cube(3, 6), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::cube(2, 14), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::box({16, 16}, {1.0, -1.0}), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec::cube(4, 16), std::invalid_argument);
  GridSpec g = GridSpec::cube(2, 16);
  CHECK(g.mode_number(0, 8) == -8);
  CHECK(g.mode_number(0, 15) == -1);
  CHECK(g.kept(0, 5));   // 2*5 < 2/3*16
  CHECK(!g.kept(0, 6));  // 12 >= 10.67
}

TEST_CASE("leray projection of a single mode") {
  GridSpec g = GridSpec::cube(2, 8);
  SpectralField f(g, 2);
  const std::size_t k = mode_index(g, {1, 0, 0});
  const std::size_t mk = mode_index(g, {-1, 0, 0});
  f.at(0, k) = 1.0;
  f.at(1, k) = 1.0;
  f.at(0, mk) = 1.0;
  f.at(1, mk) = 1.0;
  SpectralField p = leray_project(f);
  CHECK(std::abs(p.at(0, k)) < 1e-15);
  CHECK(std::abs(p.at(1, k) - 1.0) < 1e-15);
}

TEST_CASE("leray projection annihilates gradients and keeps solenoidal fields") {
  GridSpec g = GridSpec::cube(3, 16);
  SpectralField psi = random_scalar(g, 5, 1.0, 7);
  CHECK(l2_norm(leray_project(gradient(psi))) < 1e-14);
  SpectralField u = random_solenoidal(g, 5, 1.0, 8);
  CHECK(rel_diff(leray_project(u), u) < 1e-14);
  CHECK_THROWS_AS(leray_project(psi), std::invalid_argument);
}

TEST_CASE("leray projection is idempotent and orthogonal") {
  GridSpec g = GridSpec::cube(3, 16);
  SpectralField f = random_vector(g, 5, 11);
  SpectralField p = leray_project(f);
  CHECK(rel_diff(leray_project(p), p) < 1e-14);
  const double a = lp_norm(p, 2.0);
  const double b = lp_norm(f - p, 2.0);
  const double c = lp_norm(f, 2.0);
  CHECK(std::abs(a * a + b * b - c * c) / (c * c) < 1e-10);
}

TEST_CASE("transform round trip and hermitian symmetry") {
  GridSpec g = GridSpec::box({16, 12, 10}, {2.0, 3.0, 5.0});
  SpectralField f = random_vector(g, 3, 3);
  CHECK(f.hermitian_defect() < 1e-15);
  SpectralField back = to_spectral(to_physical(f));
  CHECK(rel_diff(back, f) < 1e-13);
  SpectralField z = random_scalar(g, 3, 1.0, 4, false);
  CHECK(rel_diff(to_spectral(to_physical_complex(z)), z) < 1e-13);
}

TEST_CASE("heat semigroup multipliers") {
  GridSpec g = GridSpec::cube(2, 16);
  SpectralField f = single_mode(g, {1, 1, 0}, {Complex(1.0), Complex(-1.0), Complex(0.0)}, 2);
  SpectralField e = heat_semigroup(f, 1.0, 1.0);
  const std::size_t k = mode_index(g, {1, 1, 0});
  CHECK(std::abs(e.at(0, k) - 0.5 * std::exp(-2.0)) < 1e-16);
  CHECK(rel_diff(heat_semigroup(f, 0.0), f) == 0.0);
  CHECK_THROWS_AS(heat_semigroup(f, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(heat_semigroup(f, 1.0, 0.0), std::invalid_argument);

  SpectralField r = random_vector(GridSpec::cube(3, 16), 5, 21);
  SpectralField ts = heat_semigroup(heat_semigroup(r, 0.3), 0.2);
  CHECK(rel_diff(ts, heat_semigroup(r, 0.5)) < 1e-13);
}

TEST_CASE("heat semigroup matches the evolved Gaussian") {
  // Box half-width is many standard deviations, so periodic images are
  // below rounding and the closed form on R^3 applies.
  GridSpec g = GridSpec::cube(3, 64, 24.0);
  const oracle::Gaussian g0{3, 1.0, 1.0};
  const double t = 0.5;
  const oracle::Gaussian gt = g0.evolved(t);
  SpectralField f = sample(g, 1, [&](std::span<const double> x, std::span<double> out) {
    out[0] = g0.value(oracle::centered_r2(g, x.data()));
  });
  PhysicalField ev = to_physical(heat_semigroup(f, t));
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto x = grid_point(g, i);
    err = std::max(err, std::abs(ev.values[i] - gt.value(oracle::centered_r2(g, x.data()))));
  }
  CHECK(err / gt.amplitude < 1e-10);
}

TEST_CASE("projected heat semigroup") {
  GridSpec g = GridSpec::cube(2, 16);
  SpectralField u = random_solenoidal(g, 4, 1.0, 5);
  CHECK(rel_diff(heat_semigroup_projected(u, 0.4), heat_semigroup(u, 0.4)) < 1e-15);
  SpectralField psi = random_scalar(g, 4, 1.0, 6);
  CHECK(l2_norm(heat_semigroup_projected(gradient(psi), 0.4)) < 1e-14);

  // Two modes: a solenoidal (0, s) at k = (1, 0) and a gradient i k psi at k = (0, 2).
  SpectralField m(g, 2);
  const std::size_t k1 = mode_index(g, {1, 0, 0});
  const std::size_t k1m = mode_index(g, {-1, 0, 0});
  const std::size_t k2 = mode_index(g, {0, 2, 0});
  const std::size_t k2m = mode_index(g, {0, -2, 0});
  m.at(1, k1) = Complex(0.3, 0.1);
  m.at(1, k1m) = Complex(0.3, -0.1);
  m.at(1, k2) = Complex(0.0, 2.0) * 0.25;
  m.at(1, k2m) = Complex(0.0, -2.0) * 0.25;
  SpectralField r = heat_semigroup_projected(m, 0.1);
  CHECK(std::abs(r.at(1, k1) - Complex(0.3, 0.1) * std::exp(-0.1)) < 1e-16);
  CHECK(std::abs(r.at(1, k2)) < 1e-16);
  CHECK(std::abs(r.at(0, k1)) < 1e-16);
}

TEST_CASE("nonlinear term oracles") {
  GridSpec g2 = GridSpec::cube(2, 32);
  SpectralField c(g2, 2);
  c.at(0, 0) = 0.7;
  c.at(1, 0) = -0.2;
  CHECK(l2_norm(nonlinear_term(c)) < 1e-15);
  SpectralField tg = taylor_green_2d(g2);
  CHECK(l2_norm(nonlinear_term(tg)) < 1e-14);
  CHECK(l2_norm(tensor_nonlinearity(tg, tg)) < 1e-14);
  CHECK(l2_norm(self_nonlinearity(tg)) < 1e-14);

  // Brute-force convolution on 8^3 with all modes |m| <= 2.
  GridSpec g3 = GridSpec::cube(3, 8);
  SpectralField single = single_mode(g3, {1, 2, 0}, {Complex(2.0, 1.0), Complex(-1.0, -0.5), Complex(0.3)}, 3);
  single = leray_project(single);
  CHECK(max_coeff_diff(nonlinear_term(single), oracle::brute_convective(single)) < 1e-12);
  SpectralField pair = single + leray_project(single_mode(g3, {0, 1, -2}, {Complex(0.4), Complex(1.0, 1.0), Complex(0.2, -1.0)}, 3));
  SpectralField brute = oracle::brute_convective(pair);
  CHECK(l2_norm(brute) > 0.1);
  CHECK(max_coeff_diff(nonlinear_term(pair), brute) < 1e-12);
  SpectralField rnd = random_solenoidal(g3, 2, 1.0, 31);
  CHECK(max_coeff_diff(nonlinear_term(rnd), oracle::brute_convective(rnd)) < 1e-12);
  CHECK(max_coeff_diff(tensor_nonlinearity(rnd, rnd), oracle::brute_convective(rnd)) < 1e-12);
}

TEST_CASE("divergence and advective forms agree on solenoidal fields") {
  GridSpec g = GridSpec::cube(2, 16);
  SpectralField u = random_solenoidal(g, 5, 1.0, 41);
  SpectralField a = nonlinear_term(u);
  CHECK(max_coeff_diff(tensor_nonlinearity(u, u), a) < 1e-12);
  CHECK(max_coeff_diff(self_nonlinearity(u), a) < 1e-12);
  SpectralField zero(g, 2);
  CHECK(l2_norm(tensor_nonlinearity(u, zero)) == 0.0);
  CHECK_THROWS_AS(tensor_nonlinearity(u, random_solenoidal(GridSpec::cube(2, 32), 5, 1.0, 1)),
                  std::invalid_argument);
}

TEST_CASE("nonlinear term is solenoidal and energy neutral") {
  GridSpec g = GridSpec::cube(3, 24);
  SpectralField u = random_solenoidal(g, 6, 1.0, 51);
  SpectralField n = nonlinear_term(u);
  CHECK(divergence_residual(n) < 1e-12);
  CHECK(std::abs(inner_product(n, u)) / (l2_norm(n) * l2_norm(u)) < 1e-10);
  SpectralField t = self_nonlinearity(u);
  CHECK(std::abs(inner_product(t, u)) / (l2_norm(t) * l2_norm(u)) < 1e-10);
}

TEST_CASE("perturbation nonlinearity") {
  GridSpec g = GridSpec::cube(3, 16);
  SpectralField v = random_solenoidal(g, 4, 1.0, 61);
  SpectralField phi = random_solenoidal(g, 4, 2.0, 62);
  SpectralField zero(g, 3);
  CHECK(l2_norm(perturbation_nonlinearity(zero, phi)) == 0.0);
  CHECK(max_coeff_diff(perturbation_nonlinearity(v, zero), nonlinear_term(v)) < 1e-12);
  SpectralField expect = tensor_nonlinearity(v + phi, v + phi) - tensor_nonlinearity(phi, phi);
  CHECK(max_coeff_diff(perturbation_nonlinearity(v, phi), expect) < 1e-12);
  double vmax = 0.0;
  SpectralField viaphys = perturbation_nonlinearity(v, to_physical(phi), &vmax);
  CHECK(max_coeff_diff(viaphys, expect) < 1e-12);
  CHECK(vmax == doctest::Approx(lp_norm(v, kInf)).epsilon(1e-14));
}

TEST_CASE("lp norms") {
  GridSpec g = GridSpec::box({16, 16}, {2.0, 3.0});
  SpectralField zero(g, 1);
  CHECK(lp_norm(zero, 2.0) == 0.0);
  SpectralField one(g, 1);
  one.at(0, 0) = 1.0;
  CHECK(lp_norm(one, 2.0) == doctest::Approx(std::sqrt(6.0)).epsilon(1e-14));
  GridSpec gs = GridSpec::cube(2, 16);
  SpectralField s = single_mode(gs, {1, 0, 0}, {Complex(0.0, -1.0), 0.0, 0.0}, 1);  // sin x
  // int_0^{2pi} int_0^{2pi} sin^2 x = 2 pi^2
  CHECK(lp_norm(s, 2.0) == doctest::Approx(std::sqrt(2.0) * std::numbers::pi).epsilon(1e-13));
  CHECK(lp_norm(s, kInf) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK_THROWS_AS(lp_norm(s, 0.5), std::invalid_argument);
  GridSpec g1 = GridSpec::box({16, 8}, {2.0 * std::numbers::pi, 1.0});
  SpectralField s1 = single_mode(g1, {1, 0, 0}, {Complex(0.0, -1.0), 0.0, 0.0}, 1);
  CHECK(lp_norm(s1, 2.0) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-13));
}

TEST_CASE("sobolev norms") {
  GridSpec g = GridSpec::cube(3, 16);
  SpectralField f = random_vector(g, 5, 71);
  CHECK(hs_norm(f, 0.0) == doctest::Approx(lp_norm(f, 2.0)).epsilon(1e-12));
  SpectralField m = single_mode(g, {1, 0, 0}, {Complex(1.0), 0.0, 0.0}, 1);
  CHECK(hs_norm(m, 1.0) == doctest::Approx(std::sqrt(2.0) * hs_norm(m, 0.0)).epsilon(1e-14));
  CHECK_THROWS_AS(hs_norm(m, -1.0), std::invalid_argument);

  const double l2 = lp_norm(f, 2.0);
  const double g2 = lp_norm(gradient_tensor(f), 2.0);
  const double h1 = hs_norm(f, 1.0);
  CHECK(std::abs(h1 * h1 - (l2 * l2 + g2 * g2)) / (h1 * h1) < 1e-10);
}

TEST_CASE("pressure reconstruction") {
  GridSpec g = GridSpec::cube(2, 32);
  SpectralField c(g, 2);
  c.at(0, 0) = 1.0;
  CHECK(l2_norm(reconstruct_pressure(c).field()) == 0.0);

  // (u.grad)u = grad((cos 2x + cos 2y)/4) for Taylor-Green, so p = +(cos 2x + cos 2y)/4.
  PressureField p = reconstruct_pressure(taylor_green_2d(g));
  CHECK(p.coeffs()[0] == Complex(0.0));
  SpectralField expect = sample(g, 1, [](std::span<const double> x, std::span<double> out) {
    out[0] = 0.25 * (std::cos(2 * x[0]) + std::cos(2 * x[1]));
  });
  CHECK(max_coeff_diff(p.field(), expect) < 1e-15);

  SpectralField u = random_solenoidal(GridSpec::cube(3, 16), 4, 1.0, 81);
  PressureField q = reconstruct_pressure(u);
  SpectralField gp = gradient(q.field());
  CHECK(l2_norm(leray_project(gp)) < 1e-13 * l2_norm(gp));
}

TEST_CASE("rational numbers") {
  Rational r = Rational::parse("2/4");
  CHECK(r.num == 1);
  CHECK(r.den == 2);
  CHECK(Rational::parse("0").value() == 0.0);
  CHECK(Rational::parse("-3/9").str() == "-1/3");
  CHECK_THROWS(Rational::parse("1/0"));
  CHECK_THROWS(Rational::parse("x"));
}

TEST_CASE("snapshot round trip") {
  GridSpec g = GridSpec::box({8, 12}, {1.5, 2.0});
  SpectralField f = random_scalar(g, 2, 1.0, 91, false);
  std::stringstream ss;
  write_snapshot(ss, f, Rational::make(1, 2));
  Snapshot back = read_snapshot(ss);
  CHECK(back.field.grid() == g);
  CHECK(!back.field.is_real());
  REQUIRE(back.wave_speed.has_value());
  CHECK(back.wave_speed->str() == "1/2");
  CHECK(max_coeff_diff(back.field, f) == 0.0);
  std::stringstream bad("NOT-A-SNAPSHOT\n");
  CHECK_THROWS(read_snapshot(bad));
}
