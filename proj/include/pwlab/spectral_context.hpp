#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "pwlab/grid.hpp"

namespace pwlab::spectral {

class FftPlans;

/// Per-grid wavenumber tables, dealiasing mask and FFT plans.
///
/// Contexts are created once per distinct GridSpec and live for the whole
/// process. Transforms and scratch buffers are not re-entrant; the library is
/// driven from one thread.
class Context {
 public:
  static Context& get(const GridSpec& grid);

  ~Context();
  Context(const Context&) = delete;
  Context& operator=(const Context&) = delete;

  const GridSpec& grid() const { return grid_; }
  std::size_t size() const { return n_; }

  /// Wavenumber component along `axis` for every flat mode index.
  const std::vector<double>& k(int axis) const { return k_[axis]; }
  /// Derivative wavenumber: equal to k except zero on Nyquist planes.
  const std::vector<double>& kd(int axis) const { return kd_[axis]; }
  const std::vector<double>& k2() const { return k2_; }
  const std::vector<std::uint8_t>& keep() const { return keep_; }
  /// Flat index of the mode -k.
  const std::vector<std::size_t>& mirror() const { return mirror_; }

  /// Real field: full spectrum -> physical samples.
  void inverse_real(std::span<const Complex> spec, std::span<double> phys);
  /// Real samples -> full (Hermitian) normalized spectrum.
  void forward_real(std::span<const double> phys, std::span<Complex> spec);
  void inverse_complex(std::span<const Complex> spec, std::span<Complex> phys);
  void forward_complex(std::span<const Complex> phys, std::span<Complex> spec);

  /// At least `count` scratch buffers of size() doubles.
  std::vector<std::vector<double>>& real_scratch(std::size_t count);

 private:
  explicit Context(GridSpec grid);

  GridSpec grid_;
  std::size_t n_ = 0;
  std::vector<double> k_[3];
  std::vector<double> kd_[3];
  std::vector<double> k2_;
  std::vector<std::uint8_t> keep_;
  std::vector<std::size_t> mirror_;
  std::unique_ptr<FftPlans> plans_;
  std::vector<std::vector<double>> scratch_;
};

}  // namespace pwlab::spectral
