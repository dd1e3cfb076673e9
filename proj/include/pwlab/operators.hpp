#pragma once

#include <array>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "pwlab/spectral_field.hpp"

namespace pwlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Grid samples of a real field, component-major.
struct PhysicalField {
  GridSpec grid;
  int components = 0;
  std::vector<double> values;

  PhysicalField() = default;
  PhysicalField(GridSpec g, int comps);
  std::span<double> component(int c) { return {values.data() + c * grid.size(), grid.size()}; }
  std::span<const double> component(int c) const {
    return {values.data() + c * grid.size(), grid.size()};
  }
};

/// Grid samples of a complex field, component-major.
struct ComplexPhysicalField {
  GridSpec grid;
  int components = 0;
  std::vector<Complex> values;

  ComplexPhysicalField() = default;
  ComplexPhysicalField(GridSpec g, int comps);
  std::span<Complex> component(int c) { return {values.data() + c * grid.size(), grid.size()}; }
  std::span<const Complex> component(int c) const {
    return {values.data() + c * grid.size(), grid.size()};
  }
};

using PointFunction = std::function<void(std::span<const double> x, std::span<double> out)>;
using ComplexPointFunction = std::function<void(std::span<const double> x, std::span<Complex> out)>;

/// Physical coordinates of grid point `flat` (unused axes are zero).
std::array<double, 3> grid_point(const GridSpec& grid, std::size_t flat);

PhysicalField to_physical(const SpectralField& f);
ComplexPhysicalField to_physical_complex(const SpectralField& f);
SpectralField to_spectral(const PhysicalField& f);
SpectralField to_spectral(const ComplexPhysicalField& f);

/// Samples `fn` on the grid and transforms.
SpectralField sample(const GridSpec& grid, int components, const PointFunction& fn);
SpectralField sample_complex(const GridSpec& grid, int components, const ComplexPointFunction& fn);

// ---- linear multipliers ---------------------------------------------------

/// Leray projection I - k k^T / |k|^2; the k = 0 mode passes through.
SpectralField leray_project(const SpectralField& f);
/// exp(nu t Delta); throws std::invalid_argument for t < 0 or nu <= 0.
SpectralField heat_semigroup(const SpectralField& f, double t, double nu = 1.0);
SpectralField heat_semigroup_projected(const SpectralField& f, double t, double nu = 1.0);

SpectralField divergence(const SpectralField& f);
/// ||div f|| / ||grad f|| in the spectral l2 sense (0 for constant fields).
double divergence_residual(const SpectralField& f);
SpectralField gradient(const SpectralField& scalar);
/// Component c*dim + j holds d_j f_c. Nyquist planes are differentiated to zero.
SpectralField gradient_tensor(const SpectralField& f);
SpectralField laplacian(const SpectralField& f);

void dealias(SpectralField& f);
void remove_mean(SpectralField& f);
/// Zeroes every mode lying on a Nyquist plane of any axis.
void zero_nyquist(SpectralField& f);
/// Largest |c(k)| on a Nyquist plane.
double nyquist_content(const SpectralField& f);

// ---- nonlinear terms ------------------------------------------------------

/// P((u.grad)u), advective form, dealiased.
SpectralField nonlinear_term(const SpectralField& u);
/// P div(a (x) b), dealiased.
SpectralField tensor_nonlinearity(const SpectralField& a, const SpectralField& b);
/// P div(v(x)v + v(x)phi + phi(x)v) = P div((v+phi)(x)(v+phi) - phi(x)phi).
SpectralField perturbation_nonlinearity(const SpectralField& v, const SpectralField& phi);
/// Same as perturbation_nonlinearity with the background already sampled on the grid.
/// Also reports max |v| (Euclidean) through `vmax` when non-null.
SpectralField perturbation_nonlinearity(const SpectralField& v, const PhysicalField& phi,
                                        double* vmax = nullptr);

/// P div(u (x) u) using cached scratch buffers; reports max |u| through `umax`.
SpectralField self_nonlinearity(const SpectralField& u, double* umax = nullptr);

/// Pressure solving Delta p = div((u.grad)u), zero mean.
PressureField reconstruct_pressure(const SpectralField& u);

// ---- norms ----------------------------------------------------------------

/// Physical-space L^p norm by grid quadrature (Euclidean magnitude for vectors).
double lp_norm(const SpectralField& f, double p);
double lp_norm(const PhysicalField& f, double p);
double lp_norm(const ComplexPhysicalField& f, double p);
/// (V sum_k (1+|k|^2)^s |c_k|^2)^{1/2}
double hs_norm(const SpectralField& f, double s);
/// L^2 norm via Parseval.
double l2_norm(const SpectralField& f);
/// Re <a, b>_{L^2}
double inner_product(const SpectralField& a, const SpectralField& b);
double max_abs(const PhysicalField& f);
double max_coeff_diff(const SpectralField& a, const SpectralField& b);

}  // namespace pwlab
