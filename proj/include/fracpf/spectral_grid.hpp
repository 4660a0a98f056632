#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

#include "fracpf/errors.hpp"
#include "fracpf/field.hpp"

namespace fracpf {

/// Half-plane (r2c) spectrum of an M x M field: M rows of M/2+1 modes.
using Spectrum = std::vector<std::complex<double>>;

/// Fourier pseudo-spectral operators on one periodic grid. Holds FFTW plans
/// and scratch buffers, so one workspace serves one thread.
class SpectralWorkspace {
 public:
  SpectralWorkspace(std::size_t M, Domain domain, bool dealias = false)
      : M_(M), H_(M / 2 + 1), domain_(domain), dealias_(dealias) {
    Field2D probe(M, domain);  // validates M and domain
    real_ = fftw_alloc_real(M_ * M_);
    spec_ = fftw_alloc_complex(M_ * H_);
    const int n = static_cast<int>(M_);
    forward_ = fftw_plan_dft_r2c_2d(n, n, real_, spec_, FFTW_ESTIMATE);
    inverse_ = fftw_plan_dft_c2r_2d(n, n, spec_, real_, FFTW_ESTIMATE);
    if (!forward_ || !inverse_) throw std::runtime_error("SpectralWorkspace: FFTW planning failed");

    kx_.resize(M_ * H_);
    ky_.resize(M_ * H_);
    k2_.resize(M_ * H_);
    keep_.resize(M_ * H_);
    const double fx = 2.0 * std::numbers::pi / domain.lx();
    const double fy = 2.0 * std::numbers::pi / domain.ly();
    for (std::size_t j = 0; j < M_; ++j) {
      const long wy = j <= M_ / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(M_);
      for (std::size_t i = 0; i < H_; ++i) {
        const std::size_t p = j * H_ + i;
        kx_[p] = fx * static_cast<double>(i);
        ky_[p] = fy * static_cast<double>(wy);
        k2_[p] = kx_[p] * kx_[p] + ky_[p] * ky_[p];
        const long cut = static_cast<long>(M_) / 3;
        keep_[p] = static_cast<long>(i) <= cut && std::abs(wy) <= cut;
      }
    }
  }

  SpectralWorkspace(const SpectralWorkspace&) = delete;
  SpectralWorkspace& operator=(const SpectralWorkspace&) = delete;

  ~SpectralWorkspace() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(inverse_);
    fftw_free(real_);
    fftw_free(spec_);
  }

  std::size_t size() const { return M_; }
  std::size_t modes() const { return M_ * H_; }
  const Domain& domain() const { return domain_; }
  bool dealias() const { return dealias_; }

  /// |k|^2 for each half-plane mode; index 0 is the mean mode.
  const std::vector<double>& k2() const { return k2_; }

  Field2D field(double value = 0.0) const { return Field2D(M_, domain_, value); }

  void check(const Field2D& f) const {
    detail::require(f.size() == M_ && f.domain() == domain_, "SpectralWorkspace: grid mismatch");
  }

  /// Unnormalized forward transform.
  Spectrum forward(const Field2D& f) {
    check(f);
    auto v = f.values();
    std::copy(v.begin(), v.end(), real_);
    fftw_execute(forward_);
    Spectrum out(modes());
    for (std::size_t p = 0; p < modes(); ++p) out[p] = {spec_[p][0], spec_[p][1]};
    return out;
  }

  /// Inverse transform including the 1/M^2 normalization.
  Field2D inverse(const Spectrum& s) {
    detail::require(s.size() == modes(), "SpectralWorkspace: spectrum size mismatch");
    for (std::size_t p = 0; p < modes(); ++p) {
      spec_[p][0] = s[p].real();
      spec_[p][1] = s[p].imag();
    }
    fftw_execute(inverse_);
    Field2D out = field();
    auto v = out.values();
    const double norm = 1.0 / static_cast<double>(M_ * M_);
    for (std::size_t p = 0; p < v.size(); ++p) v[p] = real_[p] * norm;
    return out;
  }

  /// Multiply every mode by symbol(|k|^2).
  template <class Symbol>
  Field2D apply_symbol(const Field2D& f, Symbol&& symbol) {
    Spectrum s = forward(f);
    for (std::size_t p = 0; p < s.size(); ++p) s[p] *= symbol(k2_[p]);
    return inverse(s);
  }

  Field2D laplacian(const Field2D& f) {
    return apply_symbol(f, [](double k2) { return -k2; });
  }

  /// Solve (c0 - c2 Laplacian) u = rhs.
  Field2D solve_helmholtz(double c0, double c2, const Field2D& rhs) {
    if (!(c0 > 0.0)) throw std::invalid_argument("solve_helmholtz: c0 must be positive");
    if (!(c2 >= 0.0)) throw std::invalid_argument("solve_helmholtz: c2 must be nonnegative");
    return apply_symbol(rhs, [c0, c2](double k2) { return 1.0 / (c0 + c2 * k2); });
  }

  Field2D derivative_x(const Field2D& f) { return derivative(f, kx_); }
  Field2D derivative_y(const Field2D& f) { return derivative(f, ky_); }

  /// int |grad f|^2 by Parseval with the same symbol as laplacian(), so that
  /// grad_sq_integral(f) == inner(f, -laplacian(f)) up to rounding.
  double grad_sq_integral(const Field2D& f) {
    const Spectrum s = forward(f);
    double sum = 0.0;
    for (std::size_t j = 0; j < M_; ++j) {
      for (std::size_t i = 0; i < H_; ++i) {
        const std::size_t p = j * H_ + i;
        const double w = (i == 0 || i == M_ / 2) ? 1.0 : 2.0;
        sum += w * k2_[p] * std::norm(s[p]);
      }
    }
    const double n2 = static_cast<double>(M_ * M_);
    return sum * domain_.area() / (n2 * n2);
  }

  /// Zero modes outside the 2/3 band.
  Field2D truncate_two_thirds(const Field2D& f) {
    Spectrum s = forward(f);
    for (std::size_t p = 0; p < s.size(); ++p)
      if (!keep_[p]) s[p] = 0.0;
    return inverse(s);
  }

 private:
  Field2D derivative(const Field2D& f, const std::vector<double>& k) {
    Spectrum s = forward(f);
    for (std::size_t j = 0; j < M_; ++j) {
      for (std::size_t i = 0; i < H_; ++i) {
        const std::size_t p = j * H_ + i;
        // Odd derivatives drop the Nyquist modes to stay real.
        if (i == M_ / 2 || j == M_ / 2) {
          s[p] = 0.0;
        } else {
          s[p] *= std::complex<double>(0.0, k[p]);
        }
      }
    }
    return inverse(s);
  }

  std::size_t M_;
  std::size_t H_;
  Domain domain_;
  bool dealias_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan inverse_ = nullptr;
  std::vector<double> kx_;
  std::vector<double> ky_;
  std::vector<double> k2_;
  std::vector<char> keep_;
};

/// Free-function forms.
inline Field2D laplacian(SpectralWorkspace& ws, const Field2D& f) { return ws.laplacian(f); }
inline Field2D solve_helmholtz(SpectralWorkspace& ws, double c0, double c2, const Field2D& rhs) {
  return ws.solve_helmholtz(c0, c2, rhs);
}
inline double grad_sq_integral(SpectralWorkspace& ws, const Field2D& f) { return ws.grad_sq_integral(f); }

}  // namespace fracpf
