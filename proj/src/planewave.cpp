#include "pwlab/planewave.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pwlab::planewave {

namespace {

std::string rule_text() {
  return "commensurability rule: L_x = p*sqrt(1+c^2)*Lambda and c*L_y = q*sqrt(1+c^2)*Lambda "
         "for integers p >= 1, q, with equal z axes";
}

int integer_ratio(double r, const char* what, const Rational& c) {
  const double n = std::round(r);
  if (std::abs(r - n) > 1e-10 * std::max(1.0, std::abs(r))) {
    std::ostringstream os;
    os << "incommensurable plane wave for c=" << c.str() << ": " << what << " = " << r
       << " is not an integer (" << rule_text() << ")";
    throw std::invalid_argument(os.str());
  }
  return static_cast<int>(n);
}

int wrap(int m, int n) { return ((m % n) + n) % n; }

// Lattice images of all non-Nyquist profile modes, -1 for Nyquist modes.
std::vector<std::ptrdiff_t> image_table(const PlaneWaveLattice& lat) {
  std::vector<std::ptrdiff_t> out(lat.grid2.size(), -1);
  for (std::size_t m = 0; m < out.size(); ++m) {
    const auto idx = lat.map_mode(m);
    if (idx) out[m] = static_cast<std::ptrdiff_t>(*idx);
  }
  return out;
}

// Rounding-level Nyquist coefficients (as left by sampling) are tolerated and dropped.
void require_nyquist_free(const SpectralField& f) {
  double peak = 0.0;
  for (const Complex& z : f.coeffs()) peak = std::max(peak, std::abs(z));
  if (nyquist_content(f) > 1e-13 * peak) throw std::invalid_argument("plane wave: profile has Nyquist content");
}

void require_profile(const SpectralField& h, const PlaneWaveLattice& lat) {
  if (!(h.grid() == lat.grid2)) throw std::invalid_argument("plane wave: profile grid does not match the lattice");
  if (h.components() != 2) throw std::invalid_argument("plane wave: profile must have 2 components");
  require_nyquist_free(h);
}

SpectralField embed_vector(const SpectralField& h, const PlaneWaveLattice& lat) {
  require_profile(h, lat);
  const double c = lat.c.value();
  SpectralField phi(lat.grid3, 3, h.is_real());
  const auto table = image_table(lat);
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (table[m] < 0) continue;
    const auto k = static_cast<std::size_t>(table[m]);
    const Complex h1 = h.at(0, m);
    phi.at(0, k) = h1 / lat.s;
    phi.at(1, k) = -c * h1 / lat.s;
    phi.at(2, k) = h.at(1, m);
  }
  return phi;
}

double off_fraction(const SpectralField& f, const PlaneWaveLattice& lat, bool vector) {
  if (!(f.grid() == lat.grid3)) throw std::invalid_argument("plane wave: field grid does not match the lattice");
  const double c = lat.c.value();
  const auto table = image_table(lat);
  std::vector<std::uint8_t> on(lat.grid3.size(), 0);
  for (auto k : table) {
    if (k >= 0) on[static_cast<std::size_t>(k)] = 1;
  }
  double total = 0.0;
  double off = 0.0;
  for (std::size_t k = 0; k < on.size(); ++k) {
    double e = 0.0;
    for (int comp = 0; comp < f.components(); ++comp) e += std::norm(f.at(comp, k));
    total += e;
    if (!on[k]) {
      off += e;
    } else if (vector) {
      off += std::norm(c * f.at(0, k) + f.at(1, k)) / (lat.s * lat.s);
    }
  }
  return total > 0.0 ? off / total : 0.0;
}

void check_fraction(double frac, double tol) {
  if (frac > tol) {
    std::ostringstream os;
    os << "field is not a plane wave: off-lattice energy fraction " << frac << " exceeds " << tol;
    throw NotAPlaneWave(os.str(), frac);
  }
}

}  // namespace

PlaneWaveLattice PlaneWaveLattice::make(Rational c, const GridSpec& grid2, const GridSpec& grid3) {
  grid2.validate();
  grid3.validate();
  if (grid2.dim != 2 || grid3.dim != 3) throw std::invalid_argument("plane wave: expected a 2D profile grid and a 3D box");
  PlaneWaveLattice lat;
  lat.c = c;
  lat.s = std::sqrt(1.0 + c.value() * c.value());
  lat.grid2 = grid2;
  lat.grid3 = grid3;
  const double lambda = grid2.periods[0];
  if (std::abs(grid3.periods[2] - grid2.periods[1]) > 1e-12 * grid2.periods[1] || grid3.points[2] != grid2.points[1]) {
    throw std::invalid_argument("plane wave: z axes of profile and box must coincide (" + rule_text() + ")");
  }
  if (grid2.dealias_fraction != grid3.dealias_fraction) {
    throw std::invalid_argument("plane wave: profile and box must use the same dealias fraction");
  }
  lat.p = integer_ratio(grid3.periods[0] / (lat.s * lambda), "L_x/(sqrt(1+c^2)*Lambda)", c);
  if (lat.p < 1) throw std::invalid_argument("plane wave: L_x too short (" + rule_text() + ")");
  if (c.num != 0) {
    lat.q = integer_ratio(c.value() * grid3.periods[1] / (lat.s * lambda), "c*L_y/(sqrt(1+c^2)*Lambda)", c);
    if (lat.q == 0) throw std::invalid_argument("plane wave: L_y too short (" + rule_text() + ")");
  }
  const int nw = grid2.points[0];
  if (grid3.points[0] < lat.p * nw || grid3.points[1] < std::abs(lat.q) * nw) {
    throw std::invalid_argument("plane wave: 3D grid too coarse to represent the profile modes");
  }
  return lat;
}

PlaneWaveLattice PlaneWaveLattice::standard(Rational c, const GridSpec& grid2, double ly_if_zero, int ny_if_zero) {
  const double s = std::sqrt(1.0 + c.value() * c.value());
  const double lambda = grid2.periods[0];
  const int nw = grid2.points[0];
  GridSpec g3;
  g3.dim = 3;
  g3.dealias_fraction = grid2.dealias_fraction;
  if (c.num == 0) {
    g3.points = {nw, ny_if_zero, grid2.points[1]};
    g3.periods = {s * lambda, ly_if_zero, grid2.periods[1]};
  } else {
    g3.points = {nw, nw, grid2.points[1]};
    g3.periods = {s * lambda, s * lambda / std::abs(c.value()), grid2.periods[1]};
  }
  return make(c, grid2, g3);
}

PlaneWaveLattice PlaneWaveLattice::from_grid3(Rational c, const GridSpec& grid3) {
  if (grid3.dim != 3) throw std::invalid_argument("plane wave: expected a 3D grid");
  const double s = std::sqrt(1.0 + c.value() * c.value());
  GridSpec g2;
  g2.dim = 2;
  g2.points = {grid3.points[0], grid3.points[2]};
  g2.periods = {grid3.periods[0] / s, grid3.periods[2]};
  g2.dealias_fraction = grid3.dealias_fraction;
  return make(c, g2, grid3);
}

std::optional<std::size_t> PlaneWaveLattice::map_mode(std::size_t mode2) const {
  const int nw = grid2.points[0];
  const int nz = grid2.points[1];
  const int iw = static_cast<int>(mode2 / static_cast<std::size_t>(nz));
  const int iz = static_cast<int>(mode2 % static_cast<std::size_t>(nz));
  const int a = grid2.mode_number(0, iw);
  const int b = grid2.mode_number(1, iz);
  if (2 * std::abs(a) == nw || 2 * std::abs(b) == nz) return std::nullopt;
  const int X = p * a;
  const int Y = -q * a;
  const int nx = grid3.points[0];
  const int ny = grid3.points[1];
  if (2 * std::abs(X) >= nx || 2 * std::abs(Y) >= ny) return std::nullopt;
  const std::size_t ix = static_cast<std::size_t>(wrap(X, nx));
  const std::size_t iy = static_cast<std::size_t>(wrap(Y, ny));
  return (ix * static_cast<std::size_t>(ny) + iy) * static_cast<std::size_t>(nz) + static_cast<std::size_t>(iz);
}

double PlaneWaveLattice::transverse_length() const { return grid3.volume() / grid2.volume(); }

SpectralField embed_W(const WaveProfile& prof, const PlaneWaveLattice& lattice) {
  if (!(prof.c == lattice.c)) throw std::invalid_argument("plane wave: profile speed differs from the lattice speed");
  return embed_vector(prof.h, lattice);
}

SpectralField embed_scalar(const SpectralField& f2, const PlaneWaveLattice& lattice) {
  if (!(f2.grid() == lattice.grid2)) throw std::invalid_argument("plane wave: profile grid does not match the lattice");
  require_nyquist_free(f2);
  SpectralField out(lattice.grid3, f2.components(), f2.is_real());
  const auto table = image_table(lattice);
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (table[m] < 0) continue;
    for (int comp = 0; comp < f2.components(); ++comp) out.at(comp, static_cast<std::size_t>(table[m])) = f2.at(comp, m);
  }
  return out;
}

double off_lattice_fraction(const SpectralField& phi, const PlaneWaveLattice& lattice) {
  if (phi.components() != 3) throw std::invalid_argument("plane wave: expected a 3-component field");
  return off_fraction(phi, lattice, true);
}

double off_lattice_fraction_scalar(const SpectralField& f3, const PlaneWaveLattice& lattice) {
  return off_fraction(f3, lattice, false);
}

WaveProfile extract_profile(const SpectralField& phi, const PlaneWaveLattice& lattice, double tol) {
  check_fraction(off_lattice_fraction(phi, lattice), tol);
  const double c = lattice.c.value();
  WaveProfile prof;
  prof.c = lattice.c;
  prof.h = SpectralField(lattice.grid2, 2, phi.is_real());
  const auto table = image_table(lattice);
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (table[m] < 0) continue;
    const auto k = static_cast<std::size_t>(table[m]);
    prof.h.at(0, m) = (phi.at(0, k) - c * phi.at(1, k)) / lattice.s;
    prof.h.at(1, m) = phi.at(2, k);
  }
  return prof;
}

WaveProfile extract_profile(const SpectralField& phi, Rational c, double tol) {
  return extract_profile(phi, PlaneWaveLattice::from_grid3(c, phi.grid()), tol);
}

SpectralField extract_scalar(const SpectralField& f3, const PlaneWaveLattice& lattice, double tol) {
  check_fraction(off_lattice_fraction_scalar(f3, lattice), tol);
  SpectralField out(lattice.grid2, f3.components(), f3.is_real());
  const auto table = image_table(lattice);
  for (std::size_t m = 0; m < table.size(); ++m) {
    if (table[m] < 0) continue;
    for (int comp = 0; comp < f3.components(); ++comp) out.at(comp, m) = f3.at(comp, static_cast<std::size_t>(table[m]));
  }
  return out;
}

WaveProfile change_of_variables_g_to_h(const SpectralField& g0, Rational c) {
  if (g0.grid().dim != 2 || g0.components() != 3) {
    throw std::invalid_argument("change of variables: expected a 3-component field on a 2D (xi,z) grid");
  }
  const double cv = c.value();
  const double s = std::sqrt(1.0 + cv * cv);
  GridSpec g2 = g0.grid();
  g2.periods[0] /= s;
  WaveProfile prof;
  prof.c = c;
  prof.h = SpectralField(g2, 2, g0.is_real());
  for (std::size_t m = 0; m < g0.modes(); ++m) {
    prof.h.at(0, m) = (g0.at(0, m) - cv * g0.at(1, m)) / s;
    prof.h.at(1, m) = g0.at(2, m);
  }
  return prof;
}

XcsDecomposition decompose_Xcs(const SpectralField& phi, const PlaneWaveLattice& lattice) {
  WaveProfile prof = extract_profile(phi, lattice);
  const SpectralField& h = prof.h;
  const auto& grid = h.grid();
  // Psi = -i k.h / |k|^2, so grad Psi = i k Psi is the longitudinal part of h.
  SpectralField psi(grid, 1, h.is_real());
  for (int iw = 0; iw < grid.points[0]; ++iw) {
    for (int iz = 0; iz < grid.points[1]; ++iz) {
      const std::size_t m = static_cast<std::size_t>(iw) * static_cast<std::size_t>(grid.points[1]) + static_cast<std::size_t>(iz);
      const double kw = grid.wavenumber(0, iw);
      const double kz = grid.wavenumber(1, iz);
      const double k2 = kw * kw + kz * kz;
      if (k2 == 0.0) continue;
      psi.at(0, m) = Complex(0.0, -1.0) * (kw * h.at(0, m) + kz * h.at(1, m)) / k2;
    }
  }
  XcsDecomposition d;
  d.solenoidal_profile.c = prof.c;
  d.solenoidal_profile.s_index = prof.s_index;
  d.solenoidal_profile.h = leray_project(h);
  d.potential = std::move(psi);
  return d;
}

SpectralField recompose_Xcs(const XcsDecomposition& d, const PlaneWaveLattice& lattice) {
  SpectralField phi = embed_W(d.solenoidal_profile, lattice);
  phi += gradient(embed_scalar(d.potential, lattice));
  return phi;
}

double commutation_check(const WaveProfile& prof0, const ns::SolverConfig& cfg, const PlaneWaveLattice& lattice) {
  cfg.validate();
  ns::validate_initial(prof0.h);
  SpectralField h = prof0.h;
  SpectralField u = embed_W(prof0, lattice);
  ns::validate_initial(u);
  const ns::Stepper s2(lattice.grid2, cfg);
  const ns::Stepper s3(lattice.grid3, cfg);
  const std::size_t steps = cfg.steps();
  double worst = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t = static_cast<double>(n - 1) * cfg.dt;
    s2.advance(h, t);
    s3.advance(u, t);
    if (n % static_cast<std::size_t>(cfg.snapshot_stride) != 0 && n != steps) continue;
    const SpectralField ref = embed_vector(h, lattice);
    const double rn = l2_norm(ref);
    const double dn = l2_norm(u - ref);
    worst = std::max(worst, rn > 0.0 ? dn / rn : dn);
  }
  return worst;
}

DecayReport profile_l2_decay_check(const WaveProfile& prof0, const ns::SolverConfig& cfg, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("profile decay: delta must be positive");
  cfg.validate();
  ns::validate_initial(prof0.h);
  DecayReport rep;
  rep.delta = delta;
  SpectralField h = prof0.h;
  const ns::Stepper stepper(h.grid(), cfg);
  const std::size_t steps = cfg.steps();
  auto sample = [&](double t) {
    rep.times.push_back(t);
    rep.l2.push_back(l2_norm(h));
    rep.linf.push_back(lp_norm(h, kInf));
  };
  sample(0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    stepper.advance(h, static_cast<double>(n - 1) * cfg.dt);
    if (n % static_cast<std::size_t>(cfg.snapshot_stride) == 0 || n == steps) sample(static_cast<double>(n) * cfg.dt);
  }
  for (std::size_t i = 1; i < rep.l2.size(); ++i) {
    if (rep.l2[i - 1] > 0.0 && !(rep.l2[i] < rep.l2[i - 1])) rep.monotone = false;
  }
  for (std::size_t i = 0; i < rep.l2.size(); ++i) {
    if (rep.l2[i] < delta) {
      rep.t0_sample = rep.times[i];
      if (i == 0) {
        rep.t0 = 0.0;
      } else {
        const double la = std::log(rep.l2[i - 1]);
        const double lb = rep.l2[i] > 0.0 ? std::log(rep.l2[i]) : la - 745.0;
        rep.t0 = rep.times[i - 1] + (la - std::log(delta)) / (la - lb) * (rep.times[i] - rep.times[i - 1]);
      }
      break;
    }
  }
  if (rep.t0) {
    for (std::size_t i = 0; i < rep.times.size(); ++i) {
      const double dt = rep.times[i] - *rep.t0;
      if (dt <= 0.0) continue;
      rep.envelope_ratio = std::max(rep.envelope_ratio, rep.linf[i] * std::sqrt(dt) / (2.0 * delta));
    }
  }
  return rep;
}

PlaneWaveBackground::PlaneWaveBackground(const WaveProfile& prof0, PlaneWaveLattice lattice,
                                         const ns::SolverConfig& cfg, std::size_t steps)
    : lattice_(std::move(lattice)), cfg_(cfg), steps_(steps), stepper_(lattice_.grid2, cfg), c_(prof0.c) {
  if (!(prof0.c == lattice_.c)) throw std::invalid_argument("plane wave: profile speed differs from the lattice speed");
  require_profile(prof0.h, lattice_);
  ns::validate_initial(prof0.h);
  profile_.reserve(steps + 1);
  profile_.push_back(prof0.h);
}

void PlaneWaveBackground::ensure(std::size_t n) {
  if (n > steps_) throw std::out_of_range("plane wave background: request beyond the horizon");
  while (profile_.size() <= n) {
    SpectralField next = profile_.back();
    stepper_.advance(next, static_cast<double>(profile_.size() - 1) * cfg_.dt);
    profile_.push_back(std::move(next));
  }
}

const SpectralField& PlaneWaveBackground::profile_state(std::size_t n) {
  ensure(n);
  return profile_[n];
}

const PhysicalField& PlaneWaveBackground::stage(std::size_t n, int stage) {
  if (n >= steps_ || stage < 0 || stage > 3) throw std::out_of_range("plane wave background: bad stage request");
  if (stages_step_ != n) {
    ensure(n);
    SpectralField next = profile_[n];
    stepper_.advance(next, static_cast<double>(n) * cfg_.dt, &stages_);
    if (profile_.size() == n + 1) profile_.push_back(std::move(next));
    stages_step_ = n;
    cached_stage_ = -1;
  }
  if (cached_stage_ != stage) {
    cache_ = to_physical(embed_vector(stages_.u[static_cast<std::size_t>(stage)], lattice_));
    cached_stage_ = stage;
  }
  return cache_;
}

SpectralField PlaneWaveBackground::state(std::size_t n) {
  ensure(n);
  return embed_vector(profile_[n], lattice_);
}

}  // namespace pwlab::planewave
