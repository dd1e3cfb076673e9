#include "pwlab/spectral_context.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>
#include <stdexcept>

namespace pwlab::spectral {

// FFTW_ESTIMATE keeps plans (and therefore results) reproducible run to run.
class FftPlans {
 public:
  explicit FftPlans(const GridSpec& g) : n_(g.size()) {
    std::vector<int> dims(g.points.begin(), g.points.end());
    last_ = dims.back();
    half_ = static_cast<std::size_t>(last_ / 2 + 1);
    outer_ = n_ / static_cast<std::size_t>(last_);
    real_ = static_cast<double*>(fftw_malloc(sizeof(double) * n_));
    half_spec_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * outer_ * half_));
    cbuf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    if (!real_ || !half_spec_ || !cbuf_) throw std::bad_alloc();
    const int rank = g.dim;
    r2c_ = fftw_plan_dft_r2c(rank, dims.data(), real_, half_spec_, FFTW_ESTIMATE);
    c2r_ = fftw_plan_dft_c2r(rank, dims.data(), half_spec_, real_, FFTW_ESTIMATE);
    fwd_ = fftw_plan_dft(rank, dims.data(), cbuf_, cbuf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft(rank, dims.data(), cbuf_, cbuf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (!r2c_ || !c2r_ || !fwd_ || !bwd_) throw std::runtime_error("fft: planning failed");
  }

  ~FftPlans() {
    fftw_destroy_plan(r2c_);
    fftw_destroy_plan(c2r_);
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(real_);
    fftw_free(half_spec_);
    fftw_free(cbuf_);
  }

  FftPlans(const FftPlans&) = delete;
  FftPlans& operator=(const FftPlans&) = delete;

  void inverse_real(std::span<const Complex> spec, std::span<double> phys) {
    auto* h = reinterpret_cast<Complex*>(half_spec_);
    const auto L = static_cast<std::size_t>(last_);
    for (std::size_t o = 0; o < outer_; ++o) {
      std::copy_n(spec.data() + o * L, half_, h + o * half_);
    }
    fftw_execute(c2r_);
    std::copy_n(real_, n_, phys.data());
  }

  void forward_real(std::span<const double> phys, std::span<Complex> spec,
                    const std::vector<std::size_t>& mirror) {
    std::copy_n(phys.data(), n_, real_);
    fftw_execute(r2c_);
    const auto* h = reinterpret_cast<const Complex*>(half_spec_);
    const auto L = static_cast<std::size_t>(last_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t o = 0; o < outer_; ++o) {
      for (std::size_t j = 0; j < half_; ++j) spec[o * L + j] = h[o * half_ + j] * scale;
    }
    for (std::size_t o = 0; o < outer_; ++o) {
      for (std::size_t j = half_; j < L; ++j) {
        const std::size_t m = o * L + j;
        spec[m] = std::conj(spec[mirror[m]]);
      }
    }
  }

  void inverse_complex(std::span<const Complex> spec, std::span<Complex> phys) {
    auto* c = reinterpret_cast<Complex*>(cbuf_);
    std::copy_n(spec.data(), n_, c);
    fftw_execute(bwd_);
    std::copy_n(c, n_, phys.data());
  }

  void forward_complex(std::span<const Complex> phys, std::span<Complex> spec) {
    auto* c = reinterpret_cast<Complex*>(cbuf_);
    std::copy_n(phys.data(), n_, c);
    fftw_execute(fwd_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < n_; ++i) spec[i] = c[i] * scale;
  }

 private:
  std::size_t n_;
  int last_ = 0;
  std::size_t half_ = 0;
  std::size_t outer_ = 0;
  double* real_ = nullptr;
  fftw_complex* half_spec_ = nullptr;
  fftw_complex* cbuf_ = nullptr;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

Context& Context::get(const GridSpec& grid) {
  static std::mutex mutex;
  static std::vector<std::unique_ptr<Context>> cache;
  std::lock_guard lock(mutex);
  for (auto& c : cache) {
    if (c->grid_ == grid) return *c;
  }
  grid.validate();
  cache.push_back(std::unique_ptr<Context>(new Context(grid)));
  return *cache.back();
}

Context::~Context() = default;

Context::Context(GridSpec grid) : grid_(std::move(grid)), n_(grid_.size()) {
  const int d = grid_.dim;
  for (int a = 0; a < d; ++a) {
    k_[a].resize(n_);
    kd_[a].resize(n_);
  }
  k2_.resize(n_);
  keep_.resize(n_);
  mirror_.resize(n_);

  int idx[3] = {0, 0, 0};
  for (std::size_t m = 0; m < n_; ++m) {
    std::size_t rem = m;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rem % static_cast<std::size_t>(grid_.points[a]));
      rem /= static_cast<std::size_t>(grid_.points[a]);
    }
    double k2 = 0.0;
    bool keep = true;
    std::size_t mirror = 0;
    for (int a = 0; a < d; ++a) {
      const int N = grid_.points[a];
      const double k = grid_.wavenumber(a, idx[a]);
      k_[a][m] = k;
      kd_[a][m] = (idx[a] == N / 2) ? 0.0 : k;
      k2 += k * k;
      keep = keep && grid_.kept(a, idx[a]);
      mirror = mirror * static_cast<std::size_t>(N) + static_cast<std::size_t>((N - idx[a]) % N);
    }
    k2_[m] = k2;
    keep_[m] = keep ? 1 : 0;
    mirror_[m] = mirror;
  }
  plans_ = std::make_unique<FftPlans>(grid_);
}

void Context::inverse_real(std::span<const Complex> spec, std::span<double> phys) {
  plans_->inverse_real(spec, phys);
}

void Context::forward_real(std::span<const double> phys, std::span<Complex> spec) {
  plans_->forward_real(phys, spec, mirror_);
}

void Context::inverse_complex(std::span<const Complex> spec, std::span<Complex> phys) {
  plans_->inverse_complex(spec, phys);
}

void Context::forward_complex(std::span<const Complex> phys, std::span<Complex> spec) {
  plans_->forward_complex(phys, spec);
}

std::vector<std::vector<double>>& Context::real_scratch(std::size_t count) {
  while (scratch_.size() < count) scratch_.emplace_back(n_, 0.0);
  return scratch_;
}

}  // namespace pwlab::spectral
