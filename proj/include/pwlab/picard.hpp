#pragma once

#include <string>
#include <vector>

#include "pwlab/ns_solver.hpp"

namespace pwlab::picard {

struct PicardConfig {
  /// Exponential weight rate; <= 0 selects 4 * M * (1 + T_star).
  double L = 0.0;
  double T_star = 1.0;
  std::vector<double> gammas{0.25, 0.5, 0.75, 1.0};
  double holder_p = 4.0;
  int max_iter = 12;
  double eps = 0.05;
  /// Iteration stops once W_n <= rel_tol * W_1.
  double rel_tol = 1e-12;
  /// Quadrature nodes are every `node_stride` solver steps.
  int node_stride = 1;

  void validate() const;
};

struct IterationRecord {
  int n = 0;
  double K = 0.0;       // sup over gamma of the weighted velocity norms of v_n
  double K_grad = 0.0;  // weighted gradient norm of v_n
  double W = 0.0;       // weighted norm of v_n - v_{n-1} (v_0 := 0)
  double ratio = 0.0;   // W_{n+1} / W_n, 0 when undefined
  double recurrence_rhs = 0.0;  // K_1 + e^{LT}K_n K'_n + a M K'_n + b M K_n
};

struct PicardReport {
  double L = 0.0;
  double M = 0.0;
  double v0_l3 = 0.0;
  bool below_eps = false;
  std::vector<IterationRecord> iterations;
  /// max_n K_{n+1} / recurrence_rhs_n; the absolute constant is fitted, not derived.
  double fitted_C = 0.0;
  bool converged = false;
  bool diverged = false;
  std::string note;
};

struct PicardResult {
  ns::Trajectory trajectory;  // last iterate at the quadrature nodes
  PicardReport report;
};

/// Successive approximations v_{n+1} = e^{t Delta} v0 + G v_n on [0, T_star].
PicardResult picard_solve(const SpectralField& v0, ns::BackgroundFlow& background, const PicardConfig& pcfg,
                          const ns::SolverConfig& cfg);
PicardResult picard_solve(const SpectralField& v0, const ns::Trajectory& phi_traj, const PicardConfig& pcfg,
                          const ns::SolverConfig& cfg);

/// sup over stored samples of e^{-Lt} t^{(1-gamma)/2} ||v(t)||_{3/gamma};
/// t = 0 only enters for gamma = 1.
double weighted_norm(const ns::Trajectory& traj, double gamma, double L);
/// sup over samples t > 0 of e^{-Lt} t^{1/2} ||grad v(t)||_3.
double gradient_weighted_norm(const ns::Trajectory& traj, double L);

/// ||grad v||_3 with the pointwise Frobenius norm.
double gradient_l3(const SpectralField& v);
/// ||phi||_inf + ||grad phi||_inf.
double w1inf_norm(const SpectralField& phi);

/// Max over stored samples of ||e^{t nu Delta} u0 - int_0^t e^{(t-s) nu Delta} P div(u(x)u)(s) ds - u(t)||_2
/// relative to ||u(t)||_2. The integral uses the stored states as nodes
/// (uniform spacing required), quadratic in s with exact exponential weights.
double duhamel_residual(const ns::Trajectory& traj, const SpectralField& u0, double nu = 1.0,
                        bool nonlinear = true);

/// Streaming form of duhamel_residual: states are pushed in time order at uniform
/// spacing h and only the last three nonlinear terms are retained.
class DuhamelMonitor {
 public:
  DuhamelMonitor(const SpectralField& u0, double h, double nu = 1.0, bool nonlinear = true);
  void push(const SpectralField& u, double t);
  /// Closes a two-node stream; further pushes are errors.
  double finish();
  double worst() const { return worst_; }

 private:
  void emit(const SpectralField& d, const SpectralField& u, double t);
  SpectralField nonlinear_term(const SpectralField& u) const;

  SpectralField u0_;
  double h_;
  double nu_;
  bool nonlinear_;
  DuhamelQuadrature quad_;
  SpectralField d_;
  std::vector<SpectralField> n_;  // up to three most recent integrands
  SpectralField pending_u_;       // state at node 1 until node 2 arrives
  double pending_t_ = 0.0;
  double t0_ = 0.0;
  std::size_t count_ = 0;
  bool closed_ = false;
  double worst_ = 0.0;
};

}  // namespace pwlab::picard
