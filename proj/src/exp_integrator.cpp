#include "pwlab/exp_integrator.hpp"

#include <cmath>
#include <stdexcept>

#include "pwlab/spectral_context.hpp"

namespace pwlab {

IfRk4::IfRk4(const std::vector<Complex>& rates, double dt) : dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("if_rk4: dt must be positive");
  half_.resize(rates.size());
  full_.resize(rates.size());
  for (std::size_t m = 0; m < rates.size(); ++m) {
    half_[m] = std::exp(rates[m] * (0.5 * dt));
    full_[m] = std::exp(rates[m] * dt);
  }
}

void IfRk4::scale(SpectralField& f, const std::vector<Complex>& e) const {
  for (int c = 0; c < f.components(); ++c) {
    auto fc = f.component(c);
    for (std::size_t m = 0; m < fc.size(); ++m) fc[m] *= e[m];
  }
}

void IfRk4::step(SpectralField& u, const Rhs& rhs, StageSet* record) const {
  if (u.modes() != full_.size()) throw std::invalid_argument("if_rk4: field/grid mismatch");
  const double h = dt_;
  SpectralField k(u.grid(), u.components(), u.is_real());
  SpectralField stage = u;
  SpectralField eu_half = u;
  scale(eu_half, half_);

  if (record) record->u[0] = u;
  rhs(u, 0, k);
  // result = E(h)(u + h/6 k1) + h/3 E(h/2)(k2 + k3) + h/6 k4
  SpectralField result = u;
  result.axpy(h / 6.0, k);
  scale(result, full_);

  stage = u;
  stage.axpy(0.5 * h, k);
  scale(stage, half_);
  if (record) record->u[1] = stage;
  rhs(stage, 1, k);
  SpectralField acc = k;

  stage = eu_half;
  stage.axpy(0.5 * h, k);
  if (record) record->u[2] = stage;
  rhs(stage, 2, k);
  acc += k;
  scale(acc, half_);
  result.axpy(h / 3.0, acc);

  // E(h) u + h E(h/2) k3
  stage = k;
  scale(stage, half_);
  stage *= h;
  {
    SpectralField eu = eu_half;
    scale(eu, half_);
    stage += eu;
  }
  if (record) record->u[3] = stage;
  rhs(stage, 3, k);
  result.axpy(h / 6.0, k);
  u = std::move(result);
}

std::array<Complex, 3> phi_functions(Complex z) {
  std::array<Complex, 3> out{};
  if (std::abs(z) < 1.0) {
    for (int j = 1; j <= 3; ++j) {
      // sum_k z^k/(k+j)!
      Complex term = 1.0;
      double fact = 1.0;
      for (int i = 2; i <= j; ++i) fact *= i;
      term /= fact;
      Complex sum = term;
      for (int k = 1; k < 30; ++k) {
        term *= z / static_cast<double>(k + j);
        sum += term;
      }
      out[static_cast<std::size_t>(j - 1)] = sum;
    }
    return out;
  }
  const Complex e = std::exp(z);
  out[0] = (e - 1.0) / z;
  out[1] = (out[0] - 1.0) / z;
  out[2] = (out[1] - 0.5) / z;
  return out;
}

DuhamelQuadrature::DuhamelQuadrature(const std::vector<Complex>& rates, double h) : h_(h) {
  if (!(h > 0.0)) throw std::invalid_argument("duhamel quadrature: h must be positive");
  const std::size_t n = rates.size();
  e_.resize(n);
  phi1_.resize(n);
  phi2_.resize(n);
  phi3_.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const Complex z = rates[m] * h;
    e_[m] = std::exp(z);
    const auto p = phi_functions(z);
    phi1_[m] = p[0];
    phi2_[m] = p[1];
    phi3_[m] = p[2];
  }
}

void DuhamelQuadrature::advance_linear(SpectralField& d, const SpectralField& n0, const SpectralField& n1) const {
  for (int c = 0; c < d.components(); ++c) {
    auto dc = d.component(c);
    auto a = n0.component(c);
    auto b = n1.component(c);
    for (std::size_t m = 0; m < dc.size(); ++m) {
      dc[m] = e_[m] * dc[m] + h_ * (a[m] * phi1_[m] + (b[m] - a[m]) * phi2_[m]);
    }
  }
}

void DuhamelQuadrature::advance_centered(SpectralField& d, const SpectralField& nm1, const SpectralField& n0,
                                         const SpectralField& n1) const {
  for (int c = 0; c < d.components(); ++c) {
    auto dc = d.component(c);
    auto a = nm1.component(c);
    auto b = n0.component(c);
    auto f = n1.component(c);
    for (std::size_t m = 0; m < dc.size(); ++m) {
      const Complex c1 = 0.5 * (f[m] - a[m]);
      const Complex c2 = 0.5 * (f[m] - 2.0 * b[m] + a[m]);
      dc[m] = e_[m] * dc[m] + h_ * (b[m] * phi1_[m] + c1 * phi2_[m] + 2.0 * c2 * phi3_[m]);
    }
  }
}

void DuhamelQuadrature::advance_forward(SpectralField& d, const SpectralField& n0, const SpectralField& n1,
                                        const SpectralField& n2) const {
  for (int c = 0; c < d.components(); ++c) {
    auto dc = d.component(c);
    auto a = n0.component(c);
    auto b = n1.component(c);
    auto f = n2.component(c);
    for (std::size_t m = 0; m < dc.size(); ++m) {
      const Complex c1 = 0.5 * (-3.0 * a[m] + 4.0 * b[m] - f[m]);
      const Complex c2 = 0.5 * (a[m] - 2.0 * b[m] + f[m]);
      dc[m] = e_[m] * dc[m] + h_ * (a[m] * phi1_[m] + c1 * phi2_[m] + 2.0 * c2 * phi3_[m]);
    }
  }
}

std::vector<Complex> heat_rates(const GridSpec& grid, double nu) {
  const auto& k2 = spectral::Context::get(grid).k2();
  std::vector<Complex> r(k2.size());
  for (std::size_t m = 0; m < k2.size(); ++m) r[m] = -nu * k2[m];
  return r;
}

}  // namespace pwlab
