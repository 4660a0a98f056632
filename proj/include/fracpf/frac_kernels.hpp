#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracpf/errors.hpp"
#include "fracpf/quadrature.hpp"
#include "fracpf/time_mesh.hpp"

namespace fracpf {

/// omega_beta(t) = t^{beta-1} / Gamma(beta).
inline double omega(double beta, double t) {
  if (!(beta > 0.0)) throw std::domain_error("omega: order must be positive");
  if (t < 0.0 || (t == 0.0 && beta < 1.0)) throw std::domain_error("omega: singular or negative argument");
  if (t == 0.0) return beta == 1.0 ? 1.0 : 0.0;
  return std::pow(t, beta - 1.0) / std::tgamma(beta);
}

/// Discrete convolution coefficients of the L1+ Caputo formula at level n.
/// coeffs[j] holds a_j^{(n)}, the weight applied to the increment at k = n - j.
struct KernelRow {
  std::size_t n = 0;
  double alpha = 0.0;
  std::vector<double> coeffs;

  double operator[](std::size_t lag) const { return coeffs[lag]; }
  std::size_t size() const { return coeffs.size(); }
};

namespace detail {

/// Precomputed constants for one fractional order.
class KernelEvaluator {
 public:
  explicit KernelEvaluator(double alpha)
      : alpha_(alpha),
        p_(2.0 - alpha),
        inv_g3_(1.0 / std::tgamma(3.0 - alpha)),
        inv_g1_(1.0 / std::tgamma(1.0 - alpha)),
        rule_(gauss_legendre(6)) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("L1+ kernels: alpha must lie in (0,1)");
  }

  // omega_{3-alpha}(x)
  double w3(double x) const { return std::pow(x, p_) * inv_g3_; }

  // omega_{3-alpha}(x + h) - omega_{3-alpha}(x) without cancellation, x > 0.
  double w3_diff(double x, double h) const { return w3(x) * std::expm1(p_ * std::log1p(h / x)); }

  double diagonal(double tau_n) const { return inv_g3_ / std::pow(tau_n, alpha_); }

  // a_{n-k}^{(n)} for k = n-1: the cells share the node t_{n-1}.
  double adjacent(double tau_n, double tau_k) const {
    const double big = std::max(tau_n, tau_k);
    const double small = std::min(tau_n, tau_k);
    return (w3_diff(big, small) - w3(small)) / (tau_n * tau_k);
  }

  // a_{n-k}^{(n)} for k <= n-2; gap = t_{n-1} - t_k > 0.
  double separated(double tau_n, double tau_k, double gap) const {
    const double outer = std::max(tau_n, tau_k);
    // Mixed second difference loses about gap / ((1-alpha) outer) digits;
    // past that point the cells are far apart and low-order Gauss is exact
    // to round-off.
    if (gap > 1.0e3 * (1.0 - alpha_) * outer) return separated_quadrature(tau_n, tau_k, gap);
    if (tau_n >= tau_k) return (w3_diff(gap + tau_n, tau_k) - w3_diff(gap, tau_k)) / (tau_n * tau_k);
    return (w3_diff(gap + tau_k, tau_n) - w3_diff(gap, tau_n)) / (tau_n * tau_k);
  }

  // Average of omega_{1-alpha}(t - s) over the cell pair by tensor Gauss-Legendre.
  double separated_quadrature(double tau_n, double tau_k, double gap) const {
    double sum = 0.0;
    const std::size_t m = rule_.nodes.size();
    for (std::size_t i = 0; i < m; ++i) {
      // lag between t in cell n and s in cell k
      const double tn = gap + tau_n * rule_.nodes[i];
      for (std::size_t j = 0; j < m; ++j) {
        const double lag = tn + tau_k * (1.0 - rule_.nodes[j]);
        sum += rule_.weights[i] * rule_.weights[j] * std::pow(lag, -alpha_);
      }
    }
    return sum * inv_g1_;
  }

  double coeff(const TimeMesh& mesh, std::size_t n, std::size_t k) const {
    const double tau_n = mesh.step(n);
    if (k == n) return diagonal(tau_n);
    const double tau_k = mesh.step(k);
    if (k + 1 == n) return adjacent(tau_n, tau_k);
    return separated(tau_n, tau_k, mesh.node(n - 1) - mesh.node(k));
  }

  double alpha() const { return alpha_; }

 private:
  double alpha_;
  double p_;
  double inv_g3_;
  double inv_g1_;
  QuadratureRule rule_;
};

}  // namespace detail

/// Single coefficient a_{n-k}^{(n)}, 1 <= k <= n <= mesh.steps().
inline double l1plus_coeff(const TimeMesh& mesh, double alpha, std::size_t n, std::size_t k) {
  if (n < 1 || n > mesh.steps() || k < 1 || k > n) throw std::out_of_range("l1plus_coeff: index out of range");
  return detail::KernelEvaluator(alpha).coeff(mesh, n, k);
}

/// Full kernel row for level n.
inline KernelRow l1plus_row(const TimeMesh& mesh, double alpha, std::size_t n) {
  if (n < 1 || n > mesh.steps()) throw std::out_of_range("l1plus_row: step index out of range");
  const detail::KernelEvaluator eval(alpha);
  KernelRow row;
  row.n = n;
  row.alpha = alpha;
  row.coeffs.resize(n);
  for (std::size_t k = 1; k <= n; ++k) row.coeffs[n - k] = eval.coeff(mesh, n, k);
  return row;
}

/// sum_{k=1}^n a_{n-k}^{(n)} incr[k-1], with incr[k-1] = v^k - v^{k-1}.
inline double caputo_apply(const KernelRow& row, std::span<const double> increments) {
  detail::require(increments.size() == row.n, "caputo_apply: increment count must equal n");
  double sum = 0.0;
  for (std::size_t k = 1; k <= row.n; ++k) sum += row.coeffs[row.n - k] * increments[k - 1];
  return sum;
}

/// sum_{k=1}^n w_k sum_{j=1}^k a_{k-j}^{(k)} w_j; nonnegative for every w.
inline double quadratic_form(const TimeMesh& mesh, double alpha, std::span<const double> w) {
  detail::require(w.size() <= mesh.steps(), "quadratic_form: sequence longer than the mesh");
  for (double x : w) detail::require_param(std::isfinite(x), "quadratic_form: entries must be finite");
  const detail::KernelEvaluator eval(alpha);
  double total = 0.0;
  for (std::size_t k = 1; k <= w.size(); ++k) {
    double inner = 0.0;
    for (std::size_t j = 1; j <= k; ++j) inner += eval.coeff(mesh, k, j) * w[j - 1];
    total += w[k - 1] * inner;
  }
  return total;
}

}  // namespace fracpf
