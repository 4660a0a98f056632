#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fracpf/frac_kernels.hpp"
#include "fracpf/quadrature.hpp"

namespace fracpf {

/// omega_{1-alpha}(t) ~ sum_l weights[l] exp(-rates[l] t), relative error <= tol on [delta, T].
struct SoeApproximation {
  double alpha = 0.0;
  double tol = 0.0;
  double delta = 0.0;
  double T = 0.0;
  std::vector<double> weights;
  std::vector<double> rates;
  double certified_error = 0.0;  // max sampled relative error at build time

  std::size_t size() const { return weights.size(); }

  double evaluate(double t) const {
    double s = 0.0;
    for (std::size_t l = 0; l < weights.size(); ++l) s += weights[l] * std::exp(-rates[l] * t);
    return s;
  }
};

class SoeConstructionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline constexpr std::size_t kSoeMaxTerms = 512;
inline constexpr std::size_t kSoeSamples = 2000;

// Smallest x with x^{alpha-1} e^{-x} / Gamma(alpha) <= target; this bounds the
// regularized upper incomplete gamma tail Q(alpha, x) for alpha < 1.
inline double soe_tail_cutoff(double alpha, double target) {
  const double lg = std::lgamma(alpha);
  double x = 1.0;
  while ((alpha - 1.0) * std::log(x) - x - lg > std::log(target)) x *= 1.05;
  return x;
}

inline double soe_max_relative_error(const SoeApproximation& soe) {
  double worst = 0.0;
  const double ld = std::log(soe.delta);
  const double lt = std::log(soe.T);
  for (std::size_t i = 0; i < kSoeSamples; ++i) {
    const double t = (i + 1 == kSoeSamples) ? soe.T
                     : i == 0               ? soe.delta
                                            : std::exp(ld + (lt - ld) * static_cast<double>(i) / (kSoeSamples - 1));
    const double exact = omega(1.0 - soe.alpha, t);
    worst = std::max(worst, std::abs(soe.evaluate(t) - exact) / exact);
  }
  return worst;
}

// Laplace representation omega_{1-alpha}(t) = sin(pi alpha)/pi int_0^inf e^{-ts} s^{alpha-1} ds:
// Gauss-Jacobi on [0, 1/T], Gauss-Legendre on dyadic panels up to the tail cutoff.
inline SoeApproximation soe_candidate(double alpha, double tol, double delta, double T, int points) {
  SoeApproximation soe{alpha, tol, delta, T, {}, {}, 0.0};
  const double c = std::sin(std::numbers::pi * alpha) / std::numbers::pi;
  const double s_lo = 1.0 / T;
  const double s_hi = soe_tail_cutoff(alpha, 0.1 * tol) / delta;

  const QuadratureRule jac = gauss_jacobi_left(points, alpha - 1.0);
  const double scale = std::pow(s_lo, alpha);
  for (std::size_t j = 0; j < jac.nodes.size(); ++j) {
    soe.rates.push_back(s_lo * jac.nodes[j]);
    soe.weights.push_back(c * scale * jac.weights[j]);
  }

  const QuadratureRule leg = gauss_legendre(points);
  for (double a = s_lo; a < s_hi; a *= 2.0) {
    const QuadratureRule panel = leg.mapped(a, 2.0 * a);
    for (std::size_t j = 0; j < panel.nodes.size(); ++j) {
      soe.rates.push_back(panel.nodes[j]);
      soe.weights.push_back(c * panel.weights[j] * std::pow(panel.nodes[j], alpha - 1.0));
    }
  }
  return soe;
}

}  // namespace detail

/// Build and certify a sum-of-exponentials approximation of omega_{1-alpha} on [delta, T].
inline SoeApproximation soe_build(double alpha, double tol, double delta, double T) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("soe_build: alpha must lie in (0,1)");
  if (!(tol > 0.0)) throw std::invalid_argument("soe_build: tolerance must be positive");
  if (!(delta > 0.0 && delta < T)) throw std::invalid_argument("soe_build: need 0 < delta < T");

  for (int points = 4; points <= 64; ++points) {
    SoeApproximation soe = detail::soe_candidate(alpha, tol, delta, T, points);
    if (soe.size() > detail::kSoeMaxTerms) break;
    soe.certified_error = detail::soe_max_relative_error(soe);
    if (soe.certified_error <= tol) return soe;
  }
  throw SoeConstructionError("soe_build: tolerance unreachable within the term limit");
}

}  // namespace fracpf
