#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace fracpf {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  /// Affinely map a rule on [0,1] onto [a,b].
  QuadratureRule mapped(double a, double b) const {
    QuadratureRule r;
    r.nodes.reserve(nodes.size());
    r.weights.reserve(weights.size());
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      r.nodes.push_back(a + (b - a) * nodes[i]);
      r.weights.push_back((b - a) * weights[i]);
    }
    return r;
  }
};

namespace detail {

// Golub-Welsch on the monic Jacobi recurrence for weight (1-y)^a (1+y)^b,
// returned on [0,1] with weight (1-x)^a x^b.
inline QuadratureRule gauss_jacobi_unit(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_jacobi: n must be >= 1");
  if (a <= -1.0 || b <= -1.0) throw std::invalid_argument("gauss_jacobi: exponents must exceed -1");

  const double ab = a + b;
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(std::max(n - 1, 1));
  diag(0) = (b - a) / (ab + 2.0);
  for (int k = 1; k < n; ++k) {
    const double s = 2.0 * k + ab;
    diag(k) = (b * b - a * a) / (s * (s + 2.0));
    double beta = 0.0;
    if (k == 1) {
      beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab) * (2.0 + ab) * (3.0 + ab));
    } else {
      beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    }
    off(k - 1) = std::sqrt(beta);
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig;
  eig.computeFromTridiagonal(diag, off.head(n - 1), Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw std::runtime_error("gauss_jacobi: eigensolver failed");

  // Weight mass on [-1,1], then rescale to [0,1].
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) + std::lgamma(b + 1.0) -
                              std::lgamma(ab + 2.0));
  const double scale = std::pow(2.0, -(ab + 1.0));

  QuadratureRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int j = 0; j < n; ++j) {
    const double v0 = eig.eigenvectors()(0, j);
    r.nodes[j] = 0.5 * (1.0 + eig.eigenvalues()(j));
    r.weights[j] = mu0 * v0 * v0 * scale;
  }
  return r;
}

}  // namespace detail

/// n-point Gauss-Legendre rule on [0,1].
inline QuadratureRule gauss_legendre(int n) { return detail::gauss_jacobi_unit(n, 0.0, 0.0); }

/// n-point Gauss rule on [0,1] for the weight x^c, c > -1.
inline QuadratureRule gauss_jacobi_left(int n, double c) { return detail::gauss_jacobi_unit(n, 0.0, c); }

}  // namespace fracpf
