#pragma once

#include <optional>
#include <vector>

#include "pwlab/ns_solver.hpp"
#include "pwlab/rational.hpp"

namespace pwlab::planewave {

/// Exact mode map between a (w,z) profile grid and a 3D box.
///
/// With s = sqrt(1+c^2) and profile w-period Lambda, the 3D box must satisfy
/// L_x = p s Lambda (p >= 1 integer) and, for c != 0, c L_y = q s Lambda
/// (q integer); the z axes coincide. The profile mode (a, b) then maps to
/// the 3D mode (p a, -q a, b).
struct PlaneWaveLattice {
  Rational c;
  double s = 1.0;
  int p = 1;
  int q = 0;
  GridSpec grid2;
  GridSpec grid3;

  /// Derives p and q; throws std::invalid_argument citing the rule when the
  /// periods are incommensurable or the 3D grid cannot represent the modes.
  static PlaneWaveLattice make(Rational c, const GridSpec& grid2, const GridSpec& grid3);
  /// Smallest box: p = 1, q = 1 (L_y = s Lambda / c), N_x = N_y = N_w. For c = 0
  /// L_y and N_y are taken from the arguments.
  static PlaneWaveLattice standard(Rational c, const GridSpec& grid2, double ly_if_zero = kTwoPi,
                                   int ny_if_zero = 8);
  /// Assumes p = 1, N_w = N_x and recovers the profile grid from a 3D grid.
  static PlaneWaveLattice from_grid3(Rational c, const GridSpec& grid3);

  /// 3D flat index of profile mode (flat 2D index); nullopt when not representable.
  std::optional<std::size_t> map_mode(std::size_t mode2) const;
  /// V3 / V2 = L_x L_y / Lambda, so ||W[h]||_2^2 = transverse_length() ||h||_2^2.
  double transverse_length() const;
};

struct WaveProfile {
  SpectralField h;  // (w,z) grid, 2 real components
  Rational c;
  double s_index = 1.0;  // regularity index used for norm reporting
};

SpectralField embed_W(const WaveProfile& prof, const PlaneWaveLattice& lattice);
/// Scalar version (no component mixing), used for Psi and for CGL fields.
SpectralField embed_scalar(const SpectralField& f2, const PlaneWaveLattice& lattice);

/// Energy fraction of a 3D field outside the image of W (off-lattice modes plus
/// the component mismatch phi_2 + c phi_1 on lattice modes).
double off_lattice_fraction(const SpectralField& phi, const PlaneWaveLattice& lattice);
double off_lattice_fraction_scalar(const SpectralField& f3, const PlaneWaveLattice& lattice);

/// Left inverse of embed_W; throws NotAPlaneWave when the off-lattice fraction exceeds `tol`.
WaveProfile extract_profile(const SpectralField& phi, const PlaneWaveLattice& lattice, double tol = 1e-10);
WaveProfile extract_profile(const SpectralField& phi, Rational c, double tol = 1e-10);
SpectralField extract_scalar(const SpectralField& f3, const PlaneWaveLattice& lattice, double tol = 1e-10);

class NotAPlaneWave : public std::invalid_argument {
 public:
  NotAPlaneWave(const std::string& what, double fraction) : std::invalid_argument(what), fraction_(fraction) {}
  double fraction() const { return fraction_; }

 private:
  double fraction_;
};

/// h1 = (g1 - c g2)/s, h2 = g3 on the (xi, z) grid relabeled to w = xi / s.
WaveProfile change_of_variables_g_to_h(const SpectralField& g0, Rational c);

struct XcsDecomposition {
  WaveProfile solenoidal_profile;  // P h
  SpectralField potential;         // Psi with h = P h + grad Psi
};

XcsDecomposition decompose_Xcs(const SpectralField& phi, const PlaneWaveLattice& lattice);
/// W[P h] + grad Psi~, the re-embedding of a decomposition.
SpectralField recompose_Xcs(const XcsDecomposition& d, const PlaneWaveLattice& lattice);

/// max over samples of ||evolve3D(W[h0])(t) - W[evolve2D(h0)(t)]||_2 / ||W[evolve2D(h0)(t)]||_2.
double commutation_check(const WaveProfile& prof0, const ns::SolverConfig& cfg, const PlaneWaveLattice& lattice);

struct DecayReport {
  bool monotone = true;
  double delta = 0.0;
  std::optional<double> t0;  // log-interpolated crossing time of ||h||_2 = delta
  std::optional<double> t0_sample;  // first sample with ||h||_2 < delta
  double envelope_ratio = 0.0;  // sup_{t > t0} ||h(t)||_inf (t - t0)^{1/2} / (2 delta)
  std::vector<double> times;
  std::vector<double> l2;
  std::vector<double> linf;
};

DecayReport profile_l2_decay_check(const WaveProfile& prof0, const ns::SolverConfig& cfg, double delta);

/// Background plane wave phi = W[h(t)], with the 2D profile stepped lazily.
/// Stage inputs are regenerated from the stored profile state of each step.
class PlaneWaveBackground final : public ns::BackgroundFlow {
 public:
  PlaneWaveBackground(const WaveProfile& prof0, PlaneWaveLattice lattice, const ns::SolverConfig& cfg,
                      std::size_t steps);
  const GridSpec& grid() const override { return lattice_.grid3; }
  double dt() const override { return cfg_.dt; }
  std::size_t steps() const override { return steps_; }
  const PhysicalField& stage(std::size_t n, int stage) override;
  SpectralField state(std::size_t n) override;

  const SpectralField& profile_state(std::size_t n);
  const PlaneWaveLattice& lattice() const { return lattice_; }

 private:
  void ensure(std::size_t n);

  PlaneWaveLattice lattice_;
  ns::SolverConfig cfg_;
  std::size_t steps_;
  ns::Stepper stepper_;
  Rational c_;
  std::vector<SpectralField> profile_;  // 2D profile at every step
  std::size_t stages_step_ = static_cast<std::size_t>(-1);
  StageSet stages_;
  int cached_stage_ = -1;
  PhysicalField cache_;
};

}  // namespace pwlab::planewave
