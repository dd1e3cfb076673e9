#include "pwlab/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pwlab/spectral_context.hpp"

namespace pwlab {

namespace {

using spectral::Context;

constexpr Complex kI{0.0, 1.0};

void require_vector(const SpectralField& f, const char* what) {
  if (f.components() != f.grid().dim) {
    throw std::invalid_argument(std::string(what) + ": expected a vector field with dim components");
  }
}

void require_real(const SpectralField& f, const char* what) {
  if (!f.is_real()) throw std::invalid_argument(std::string(what) + ": expected a real field");
}

void project_in_place(SpectralField& f) {
  const int d = f.grid().dim;
  auto& ctx = Context::get(f.grid());
  const auto& k2 = ctx.k2();
  const std::size_t n = f.modes();
  for (std::size_t m = 1; m < n; ++m) {
    Complex kdotf{};
    for (int j = 0; j < d; ++j) kdotf += ctx.k(j)[m] * f.at(j, m);
    const Complex s = kdotf / k2[m];
    for (int j = 0; j < d; ++j) f.at(j, m) -= ctx.k(j)[m] * s;
  }
}

double pow_abs(double m, double p) {
  if (p == 2.0) return m * m;
  if (p == 3.0) return m * m * m;
  if (p == 4.0) {
    const double m2 = m * m;
    return m2 * m2;
  }
  if (p == 6.0) {
    const double m3 = m * m * m;
    return m3 * m3;
  }
  return std::pow(m, p);
}

double lp_from_magnitudes(std::span<const double> mag, double p, double cell) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  double peak = 0.0;
  for (double v : mag) peak = std::max(peak, v);
  if (std::isinf(p) || peak == 0.0) return peak;
  double s = 0.0;
  for (double v : mag) s += pow_abs(v / peak, p);
  return peak * std::pow(s * cell, 1.0 / p);
}

// Forward-transforms the listed products, dealiases, takes P div of the
// resulting tensor. `products[c*d + j]` must hold T_cj in physical space.
SpectralField projected_divergence(const GridSpec& grid, const std::vector<std::span<const double>>& products,
                                   bool symmetric) {
  const int d = grid.dim;
  auto& ctx = Context::get(grid);
  const std::size_t n = grid.size();
  SpectralField out(grid, d, true);
  std::vector<Complex> spec(n);
  const auto& keep = ctx.keep();
  for (int c = 0; c < d; ++c) {
    for (int j = 0; j < d; ++j) {
      if (symmetric && j < c) continue;
      ctx.forward_real(products[static_cast<std::size_t>(c * d + j)], spec);
      const auto& kj = ctx.k(j);
      auto oc = out.component(c);
      for (std::size_t m = 0; m < n; ++m) {
        if (keep[m]) oc[m] += kI * kj[m] * spec[m];
      }
      if (symmetric && j != c) {
        const auto& kc = ctx.k(c);
        auto oj = out.component(j);
        for (std::size_t m = 0; m < n; ++m) {
          if (keep[m]) oj[m] += kI * kc[m] * spec[m];
        }
      }
    }
  }
  project_in_place(out);
  return out;
}

}  // namespace

PhysicalField::PhysicalField(GridSpec g, int comps)
    : grid(std::move(g)), components(comps), values(grid.size() * static_cast<std::size_t>(comps), 0.0) {}

ComplexPhysicalField::ComplexPhysicalField(GridSpec g, int comps)
    : grid(std::move(g)), components(comps), values(grid.size() * static_cast<std::size_t>(comps)) {}

std::array<double, 3> grid_point(const GridSpec& grid, std::size_t flat) {
  std::array<double, 3> x{0.0, 0.0, 0.0};
  for (int a = grid.dim - 1; a >= 0; --a) {
    const auto N = static_cast<std::size_t>(grid.points[a]);
    x[a] = static_cast<double>(flat % N) * grid.periods[a] / static_cast<double>(N);
    flat /= N;
  }
  return x;
}

PhysicalField to_physical(const SpectralField& f) {
  require_real(f, "to_physical");
  auto& ctx = Context::get(f.grid());
  PhysicalField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) ctx.inverse_real(f.component(c), out.component(c));
  return out;
}

ComplexPhysicalField to_physical_complex(const SpectralField& f) {
  auto& ctx = Context::get(f.grid());
  ComplexPhysicalField out(f.grid(), f.components());
  for (int c = 0; c < f.components(); ++c) ctx.inverse_complex(f.component(c), out.component(c));
  return out;
}

SpectralField to_spectral(const PhysicalField& f) {
  auto& ctx = Context::get(f.grid);
  SpectralField out(f.grid, f.components, true);
  for (int c = 0; c < f.components; ++c) ctx.forward_real(f.component(c), out.component(c));
  return out;
}

SpectralField to_spectral(const ComplexPhysicalField& f) {
  auto& ctx = Context::get(f.grid);
  SpectralField out(f.grid, f.components, false);
  for (int c = 0; c < f.components; ++c) ctx.forward_complex(f.component(c), out.component(c));
  return out;
}

SpectralField sample(const GridSpec& grid, int components, const PointFunction& fn) {
  PhysicalField phys(grid, components);
  std::vector<double> val(static_cast<std::size_t>(components));
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = grid_point(grid, i);
    fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim)), val);
    for (int c = 0; c < components; ++c) phys.component(c)[i] = val[static_cast<std::size_t>(c)];
  }
  return to_spectral(phys);
}

SpectralField sample_complex(const GridSpec& grid, int components, const ComplexPointFunction& fn) {
  ComplexPhysicalField phys(grid, components);
  std::vector<Complex> val(static_cast<std::size_t>(components));
  const std::size_t n = grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto x = grid_point(grid, i);
    fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim)), val);
    for (int c = 0; c < components; ++c) phys.component(c)[i] = val[static_cast<std::size_t>(c)];
  }
  return to_spectral(phys);
}

SpectralField leray_project(const SpectralField& f) {
  require_vector(f, "leray_project");
  SpectralField out = f;
  project_in_place(out);
  return out;
}

SpectralField heat_semigroup(const SpectralField& f, double t, double nu) {
  if (t < 0.0) throw std::invalid_argument("heat_semigroup: t must be nonnegative");
  if (!(nu > 0.0)) throw std::invalid_argument("heat_semigroup: nu must be positive");
  SpectralField out = f;
  const auto& k2 = Context::get(f.grid()).k2();
  const std::size_t n = f.modes();
  std::vector<double> factor(n);
  for (std::size_t m = 0; m < n; ++m) factor[m] = std::exp(-nu * k2[m] * t);
  for (int c = 0; c < f.components(); ++c) {
    auto oc = out.component(c);
    for (std::size_t m = 0; m < n; ++m) oc[m] *= factor[m];
  }
  return out;
}

SpectralField heat_semigroup_projected(const SpectralField& f, double t, double nu) {
  return leray_project(heat_semigroup(f, t, nu));
}

SpectralField divergence(const SpectralField& f) {
  require_vector(f, "divergence");
  auto& ctx = Context::get(f.grid());
  SpectralField out(f.grid(), 1, f.is_real());
  auto o = out.component(0);
  for (int j = 0; j < f.grid().dim; ++j) {
    const auto& kj = ctx.k(j);
    auto fj = f.component(j);
    for (std::size_t m = 0; m < f.modes(); ++m) o[m] += kI * kj[m] * fj[m];
  }
  return out;
}

double divergence_residual(const SpectralField& f) {
  require_vector(f, "divergence_residual");
  auto& ctx = Context::get(f.grid());
  const auto& k2 = ctx.k2();
  double num = 0.0;
  double den = 0.0;
  for (std::size_t m = 0; m < f.modes(); ++m) {
    Complex kdotf{};
    double mag = 0.0;
    for (int j = 0; j < f.grid().dim; ++j) {
      kdotf += ctx.k(j)[m] * f.at(j, m);
      mag += std::norm(f.at(j, m));
    }
    num += std::norm(kdotf);
    den += k2[m] * mag;
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

SpectralField gradient(const SpectralField& scalar) {
  if (scalar.components() != 1) throw std::invalid_argument("gradient: expected a scalar field");
  auto& ctx = Context::get(scalar.grid());
  const int d = scalar.grid().dim;
  SpectralField out(scalar.grid(), d, scalar.is_real());
  auto s = scalar.component(0);
  for (int j = 0; j < d; ++j) {
    const auto& kj = ctx.k(j);
    auto oj = out.component(j);
    for (std::size_t m = 0; m < scalar.modes(); ++m) oj[m] = kI * kj[m] * s[m];
  }
  return out;
}

SpectralField gradient_tensor(const SpectralField& f) {
  auto& ctx = Context::get(f.grid());
  const int d = f.grid().dim;
  SpectralField out(f.grid(), f.components() * d, f.is_real());
  for (int c = 0; c < f.components(); ++c) {
    auto fc = f.component(c);
    for (int j = 0; j < d; ++j) {
      const auto& kj = ctx.kd(j);
      auto o = out.component(c * d + j);
      for (std::size_t m = 0; m < f.modes(); ++m) o[m] = kI * kj[m] * fc[m];
    }
  }
  return out;
}

SpectralField laplacian(const SpectralField& f) {
  const auto& k2 = Context::get(f.grid()).k2();
  SpectralField out = f;
  for (int c = 0; c < f.components(); ++c) {
    auto oc = out.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m) oc[m] *= -k2[m];
  }
  return out;
}

void dealias(SpectralField& f) {
  const auto& keep = Context::get(f.grid()).keep();
  for (int c = 0; c < f.components(); ++c) {
    auto fc = f.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m) {
      if (!keep[m]) fc[m] = Complex{};
    }
  }
}

void remove_mean(SpectralField& f) {
  for (int c = 0; c < f.components(); ++c) f.at(c, 0) = Complex{};
}

namespace {
bool on_nyquist_plane(const GridSpec& g, std::size_t m) {
  for (int a = g.dim - 1; a >= 0; --a) {
    const auto N = static_cast<std::size_t>(g.points[a]);
    if (m % N == N / 2) return true;
    m /= N;
  }
  return false;
}
}  // namespace

void zero_nyquist(SpectralField& f) {
  for (std::size_t m = 0; m < f.modes(); ++m) {
    if (!on_nyquist_plane(f.grid(), m)) continue;
    for (int c = 0; c < f.components(); ++c) f.at(c, m) = Complex{};
  }
}

double nyquist_content(const SpectralField& f) {
  double worst = 0.0;
  for (std::size_t m = 0; m < f.modes(); ++m) {
    if (!on_nyquist_plane(f.grid(), m)) continue;
    for (int c = 0; c < f.components(); ++c) worst = std::max(worst, std::abs(f.at(c, m)));
  }
  return worst;
}

SpectralField nonlinear_term(const SpectralField& u_in) {
  require_vector(u_in, "nonlinear_term");
  require_real(u_in, "nonlinear_term");
  const SpectralField u = divergence_residual(u_in) > 1e-12 ? leray_project(u_in) : u_in;
  const GridSpec& grid = u.grid();
  const int d = grid.dim;
  const std::size_t n = grid.size();

  const PhysicalField vel = to_physical(u);
  const PhysicalField grad = to_physical(gradient_tensor(u));
  PhysicalField adv(grid, d);
  for (int c = 0; c < d; ++c) {
    auto a = adv.component(c);
    for (int j = 0; j < d; ++j) {
      auto uj = vel.component(j);
      auto g = grad.component(c * d + j);
      for (std::size_t i = 0; i < n; ++i) a[i] += uj[i] * g[i];
    }
  }
  SpectralField out = to_spectral(adv);
  dealias(out);
  project_in_place(out);
  return out;
}

SpectralField tensor_nonlinearity(const SpectralField& a, const SpectralField& b) {
  require_vector(a, "tensor_nonlinearity");
  require_real(a, "tensor_nonlinearity");
  a.check_compatible(b);
  const GridSpec& grid = a.grid();
  const int d = grid.dim;
  const std::size_t n = grid.size();
  const bool same = (&a == &b) || a.coeffs() == b.coeffs();

  const PhysicalField pa = to_physical(a);
  const PhysicalField pb = same ? PhysicalField{} : to_physical(b);
  const PhysicalField& rb = same ? pa : pb;

  std::vector<std::vector<double>> prod(static_cast<std::size_t>(d * d));
  std::vector<std::span<const double>> views(static_cast<std::size_t>(d * d));
  for (int c = 0; c < d; ++c) {
    for (int j = 0; j < d; ++j) {
      if (same && j < c) continue;
      auto& p = prod[static_cast<std::size_t>(c * d + j)];
      p.resize(n);
      auto ac = pa.component(c);
      auto bj = rb.component(j);
      for (std::size_t i = 0; i < n; ++i) p[i] = ac[i] * bj[i];
      views[static_cast<std::size_t>(c * d + j)] = p;
    }
  }
  return projected_divergence(grid, views, same);
}

SpectralField perturbation_nonlinearity(const SpectralField& v, const SpectralField& phi) {
  v.check_compatible(phi);
  return perturbation_nonlinearity(v, to_physical(phi));
}

namespace {

// P div(v(x)v + v(x)phi + phi(x)v) with phi optional.
SpectralField symmetric_products(const SpectralField& v, const PhysicalField* phi, double* vmax) {
  require_vector(v, "nonlinearity");
  require_real(v, "nonlinearity");
  if (phi && (!(phi->grid == v.grid()) || phi->components != v.components())) {
    throw std::invalid_argument("nonlinearity: background grid mismatch");
  }
  const GridSpec& grid = v.grid();
  const int d = grid.dim;
  const std::size_t n = grid.size();
  auto& ctx = Context::get(grid);

  auto& scratch = ctx.real_scratch(static_cast<std::size_t>(d + d * d));
  auto buf = [&](int i) -> std::vector<double>& { return scratch[static_cast<std::size_t>(i)]; };
  for (int c = 0; c < d; ++c) ctx.inverse_real(v.component(c), buf(c));
  if (vmax) {
    double peak = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += buf(c)[i] * buf(c)[i];
      peak = std::max(peak, s);
    }
    *vmax = std::sqrt(peak);
  }

  std::vector<std::span<const double>> views(static_cast<std::size_t>(d * d));
  for (int c = 0; c < d; ++c) {
    for (int j = c; j < d; ++j) {
      auto& p = buf(d + c * d + j);
      const auto& vc = buf(c);
      const auto& vj = buf(j);
      if (phi) {
        auto pc = phi->component(c);
        auto pj = phi->component(j);
        for (std::size_t i = 0; i < n; ++i) p[i] = vc[i] * vj[i] + vc[i] * pj[i] + pc[i] * vj[i];
      } else {
        for (std::size_t i = 0; i < n; ++i) p[i] = vc[i] * vj[i];
      }
      views[static_cast<std::size_t>(c * d + j)] = p;
    }
  }
  return projected_divergence(grid, views, true);
}

}  // namespace

SpectralField perturbation_nonlinearity(const SpectralField& v, const PhysicalField& phi,
                                        double* vmax) {
  return symmetric_products(v, &phi, vmax);
}

SpectralField self_nonlinearity(const SpectralField& u, double* umax) {
  return symmetric_products(u, nullptr, umax);
}

PressureField reconstruct_pressure(const SpectralField& u) {
  require_vector(u, "reconstruct_pressure");
  const GridSpec& grid = u.grid();
  const int d = grid.dim;
  const std::size_t n = grid.size();
  auto& ctx = Context::get(grid);
  const PhysicalField vel = to_physical(u);
  const PhysicalField grad = to_physical(gradient_tensor(u));
  PhysicalField adv(grid, d);
  for (int c = 0; c < d; ++c) {
    auto a = adv.component(c);
    for (int j = 0; j < d; ++j) {
      auto uj = vel.component(j);
      auto g = grad.component(c * d + j);
      for (std::size_t i = 0; i < n; ++i) a[i] += uj[i] * g[i];
    }
  }
  SpectralField conv = to_spectral(adv);
  dealias(conv);
  SpectralField p(grid, 1, true);
  const auto& k2 = ctx.k2();
  for (std::size_t m = 1; m < n; ++m) {
    Complex kdot{};
    for (int j = 0; j < d; ++j) kdot += ctx.k(j)[m] * conv.at(j, m);
    p.at(0, m) = -kI * kdot / k2[m];
  }
  return PressureField(std::move(p));
}

double lp_norm(const PhysicalField& f, double p) {
  const std::size_t n = f.grid.size();
  std::vector<double> mag(n, 0.0);
  for (int c = 0; c < f.components; ++c) {
    auto fc = f.component(c);
    for (std::size_t i = 0; i < n; ++i) mag[i] += fc[i] * fc[i];
  }
  for (auto& m : mag) m = std::sqrt(m);
  return lp_from_magnitudes(mag, p, f.grid.cell_volume());
}

double lp_norm(const ComplexPhysicalField& f, double p) {
  const std::size_t n = f.grid.size();
  std::vector<double> mag(n, 0.0);
  for (int c = 0; c < f.components; ++c) {
    auto fc = f.component(c);
    for (std::size_t i = 0; i < n; ++i) mag[i] += std::norm(fc[i]);
  }
  for (auto& m : mag) m = std::sqrt(m);
  return lp_from_magnitudes(mag, p, f.grid.cell_volume());
}

double lp_norm(const SpectralField& f, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  return f.is_real() ? lp_norm(to_physical(f), p) : lp_norm(to_physical_complex(f), p);
}

double hs_norm(const SpectralField& f, double s) {
  if (s < 0.0) throw std::invalid_argument("hs_norm: s must be nonnegative");
  const auto& k2 = Context::get(f.grid()).k2();
  double sum = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    auto fc = f.component(c);
    for (std::size_t m = 0; m < f.modes(); ++m) {
      const double w = s == 0.0 ? 1.0 : std::pow(1.0 + k2[m], s);
      sum += w * std::norm(fc[m]);
    }
  }
  return std::sqrt(sum * f.grid().volume());
}

double l2_norm(const SpectralField& f) {
  double sum = 0.0;
  for (const auto& c : f.coeffs()) sum += std::norm(c);
  return std::sqrt(sum * f.grid().volume());
}

double inner_product(const SpectralField& a, const SpectralField& b) {
  a.check_compatible(b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    sum += (std::conj(a.coeffs()[i]) * b.coeffs()[i]).real();
  }
  return sum * a.grid().volume();
}

double max_abs(const PhysicalField& f) { return lp_norm(f, kInf); }

double max_coeff_diff(const SpectralField& a, const SpectralField& b) {
  a.check_compatible(b);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) {
    worst = std::max(worst, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  }
  return worst;
}

}  // namespace pwlab
