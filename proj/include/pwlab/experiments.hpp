#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pwlab/initial_data.hpp"
#include "pwlab/planewave.hpp"

namespace pwlab::experiments {

/// -(1 - 3/p)/2, the critical decay exponent of ||v(t)||_p.
double theoretical_slope(double p);

struct DecayFit {
  double p = std::numeric_limits<double>::quiet_NaN();
  double slope = 0.0;
  double theory = 0.0;
  double residual = 0.0;  // rms of the log-log residuals
  double t_a = 0.0;
  double t_b = 0.0;
  std::size_t samples = 0;
};

/// Least-squares slope of log v against log t over the samples with t in [t_a, t_b].
/// Needs at least 8 samples; throws on nonpositive values inside the window.
DecayFit fit_decay(std::span<const double> t, std::span<const double> v, double t_a, double t_b,
                   double p = std::numeric_limits<double>::quiet_NaN());

/// Slope tolerance used for pass/fail: [-0.10, 0.05] for p = 3, +-0.10 for
/// finite p > 3, +-0.15 for p = inf.
bool slope_accepted(const DecayFit& fit);

// ---- heat-kernel estimates ------------------------------------------------

struct HeatEstimateOptions {
  double t_min = 0.1;
  double t_max = 100.0;
  int times_per_decade = 20;
  /// Gaussian family exp(-|x|^2 / (2 s2)) with s2 log-spaced over [s2_min, s2_max].
  double s2_min = 1e-4;
  double s2_max = 1e8;
  int widths_per_decade = 40;
  /// Width of the single Gaussian reported alongside the family supremum.
  double fixed_s2 = 1.0;
};

struct HeatEstimateRow {
  double t = 0.0;
  double ratio_sup = 0.0;
  double ratio_fixed = 0.0;
  double grad_ratio_sup = 0.0;
  double grad_ratio_fixed = 0.0;
};

struct HeatEstimateReport {
  double q = 0.0;
  double p = 0.0;
  int d = 0;
  double exponent = 0.0;       // (d/q - d/p)/2
  double grad_exponent = 0.0;  // (1 + d/q - d/p)/2
  std::vector<HeatEstimateRow> rows;
  double max_ratio = 0.0;
  double max_grad_ratio = 0.0;
  /// (max - min) / max of the supremum ratio over the last decade of t.
  double variation = 0.0;
  double grad_variation = 0.0;
  bool bounded = false;
  bool flat(double tol = 0.01) const { return variation < tol && grad_variation < tol; }
};

/// Ratios ||e^{t Delta} u0||_p t^{(d/q-d/p)/2} / ||u0||_q and the gradient analog for
/// closed-form Gaussian data, as a supremum over a width family (the operator
/// norm estimate) and for one fixed Gaussian.
HeatEstimateReport heat_estimate_check(double q, double p, int d, const HeatEstimateOptions& opts = {});

// ---- stability of plane waves ---------------------------------------------

struct StabilityConfig {
  planewave::WaveProfile prof0;
  GridSpec grid3;
  PerturbationSpec v0_spec;
  double eps = 0.05;    // ||v0||_3 after rescaling
  double delta = 0.05;  // profile L^2 threshold for the injection time
  std::vector<double> p_set{3.0, 6.0, std::numeric_limits<double>::infinity()};
  double T = 1.0;  // horizon after injection
  ns::SolverConfig solver;
  /// Fit window in time since injection; t_a <= 0 selects [4 a^2, R^2 / 4] (a core, R support radius).
  double t_a = 0.0;
  double t_b = 0.0;
  /// Profile-only evolution stops with an error if ||h||_2 >= delta at this time.
  double t_delta_max = 50.0;
  double growth_abort = 10.0;
  void validate() const;
};

struct EnvelopeCheck {
  double p = 0.0;
  double sup = 0.0;       // sup over the window of t^{(1-3/p)/2} ||v||_p
  double at_start = 0.0;  // value at the first window sample
  bool bounded = false;   // finite and sup <= growth_abort * at_start
};

struct DecayWindow {
  double t_box = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
  double decades = 0.0;
  bool degraded = false;  // shorter than one decade
};

/// t_box = (min box / 2 - R)^2 / 4; the window defaults to [4 a^2, R^2 / 4] (a the
/// vortex core or the grid spacing for a bump), clipped to t_box and T.
DecayWindow decay_window(const GridSpec& grid3, const PerturbationSpec& spec, double T, double t_a = 0.0,
                         double t_b = 0.0);

struct DecayJudgement {
  std::vector<DecayFit> fits;  // successful fits only
  std::vector<EnvelopeCheck> envelopes;
  std::vector<bool> accepted;
  std::string note;
};

/// Fits and envelope checks for series[j] = ||v(t)||_{p_set[j]}; a degraded window
/// is judged by the envelope check only.
DecayJudgement judge_decay(std::span<const double> times, const std::vector<std::vector<double>>& series,
                           std::span<const double> p_set, const DecayWindow& w, double growth_abort);

struct StabilityReport {
  double t_delta = 0.0;
  double profile_l2 = 0.0;  // ||h(t_delta)||_2
  double v0_l3 = 0.0;
  double t_box = 0.0;
  double t_a = 0.0;
  double t_b = 0.0;
  double window_decades = 0.0;
  /// Slopes are judged when the window spans a decade; otherwise the envelope check decides.
  bool degraded = false;
  bool aborted = false;
  std::string note;
  ns::Trajectory v;  // diagnostics only; lp columns follow p_set
  std::vector<double> phi_linf;  // ||phi(t)||_inf at the v samples
  std::vector<DecayFit> fits;
  std::vector<EnvelopeCheck> envelopes;
  /// Per p: slope_accepted when not degraded, envelope bounded otherwise.
  std::vector<bool> accepted;
  bool passed() const;
};

/// Evolves the profile alone until ||h||_2 < delta, injects the rescaled
/// perturbation and streams v against the plane-wave background.
StabilityReport stability_run(const StabilityConfig& cfg);

/// Profile-only evolution until ||h||_2 < delta; returns the state and time.
struct ProfileRestart {
  SpectralField h;
  double t_delta = 0.0;
  std::size_t steps = 0;
};
ProfileRestart evolve_profile_until(const SpectralField& h0, const ns::SolverConfig& solver, double delta,
                                    double t_max);

/// Perturbation field shaped by `spec` and rescaled to ||v0||_3 = eps (zero stays zero).
SpectralField scaled_perturbation(const GridSpec& grid3, const PerturbationSpec& spec, double eps);

// ---- Phi contraction --------------------------------------------------------

struct ContractionConfig {
  planewave::WaveProfile prof0;
  GridSpec grid3;
  double delta = 0.05;
  /// Skip the profile-only phase (stress case: big profile, early start).
  bool early_start = false;
  double t_delta_max = 50.0;
  double M = 0.05;  // radius of the ball in the stability space
  std::vector<double> p_set{4.0, 6.0, std::numeric_limits<double>::infinity()};
  double T = 1.0;
  ns::SolverConfig solver;
  int node_stride = 1;
  int pairs = 20;
  int band = 4;
  std::uint64_t seed = 1;
  double ratio_bound = 0.5;
  void validate() const;
};

struct PairRecord {
  double norm_v = 0.0;
  double norm_w = 0.0;
  double d_in = 0.0;
  double d_out = 0.0;
  double ratio = 0.0;
};

struct ContractionReport {
  double t_delta = 0.0;
  double profile_l2 = 0.0;
  double phi_linf = 0.0;  // sup over nodes of ||phi||_inf
  double M = 0.0;
  double max_ratio = 0.0;
  std::vector<PairRecord> pairs;
  bool contraction = false;  // max_ratio < 1
  bool within_bound = false;  // max_ratio <= ratio_bound
  std::string note;
};

/// Distance of the stability space on a sampled time grid:
/// sup_{p > 3, t > 0} t^{1/2 - 3/(2p)} ||f(t)||_p + sup_t ||f(t)||_3.
double stability_distance(std::span<const SpectralField> f, std::span<const double> times,
                          std::span<const double> p_set);

ContractionReport phi_contraction_check(const ContractionConfig& cfg);

/// Same, with the pair (v, w) supplied as sampled paths on the node grid.
PairRecord phi_pair_ratio(std::span<const SpectralField> v, std::span<const SpectralField> w,
                          std::span<const PhysicalField> phi, const std::vector<double>& times,
                          std::span<const double> p_set, double nu);

// ---- Kato smallness scan -------------------------------------------------------

struct KatoScanConfig {
  GridSpec grid3;
  PerturbationSpec shape;
  std::vector<double> amplitudes;  // target ||u0||_3
  ns::SolverConfig solver;
  /// Samples with t below this fraction of T are treated as transient.
  double transient_fraction = 0.2;
};

struct KatoScanEntry {
  double amplitude = 0.0;
  double l3 = 0.0;
  double envelope_sup = 0.0;    // sup_t t^{1/2} ||u||_inf
  double envelope_final = 0.0;
  bool nonincreasing = false;   // after the transient
  bool completed = false;
  std::string error;
  std::vector<double> times;
  std::vector<double> envelope;
  bool bounded() const { return completed && nonincreasing; }
};

struct KatoScanReport {
  std::vector<KatoScanEntry> entries;
  /// Largest amplitude such that it and every smaller one stayed bounded (-1 if none).
  double frontier = -1.0;
};

KatoScanReport kato_smallness_scan(const KatoScanConfig& cfg);

}  // namespace pwlab::experiments
