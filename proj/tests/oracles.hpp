#pragma once

// Reference computations used by the tests. Nothing here calls the closed
// forms under test.

#include <cmath>
#include <cstdint>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracpf/random.hpp"
#include "fracpf/time_mesh.hpp"

namespace oracle {

/// a_{n-k}^{(n)} = (1 / (tau_n tau_k)) int_{t_{n-1}}^{t_n} int_{t_{k-1}}^{min(t, t_k)} w_{1-alpha}(t - s) ds dt
/// by nested double-exponential quadrature. Both integrals are written in
/// offsets from the point where the kernel can blow up, so the singularity
/// sits at 0 where doubles are dense.
inline double l1plus_coeff(const fracpf::TimeMesh& mesh, double alpha, std::size_t n, std::size_t k,
                           double tol = 1e-14) {
  static boost::math::quadrature::tanh_sinh<double> outer_rule(12);
  static boost::math::quadrature::tanh_sinh<double> inner_rule(12);
  const double tau_n = mesh.step(n), tau_k = mesh.step(k);
  const double g = std::tgamma(1.0 - alpha);
  auto kernel = [&](double lag) { return std::pow(lag, -alpha) / g; };

  auto outer = [&](double d) {
    // t = t_{n-1} + d
    if (d <= 0.0) return 0.0;
    if (k == n) return inner_rule.integrate(kernel, 0.0, d, tol);  // lag t - s in (0, d]
    const double gap = mesh.node(n - 1) - mesh.node(k);
    // s = t_k - r, lag = d + gap + r
    return inner_rule.integrate([&](double r) { return kernel(d + gap + r); }, 0.0, tau_k, tol);
  };
  return outer_rule.integrate(outer, 0.0, tau_n, tol) / (tau_n * tau_k);
}

/// Random mesh with steps drawn log-uniformly from [1e-3, 1] and rescaled
/// so that t_N = T.
inline fracpf::TimeMesh random_mesh(std::uint64_t seed, std::size_t N, double T = 1.0, double spread = 3.0) {
  fracpf::CounterRng rng(seed);
  std::vector<double> steps(N);
  double sum = 0.0;
  for (auto& s : steps) {
    s = std::pow(10.0, -spread * rng.next_open());
    sum += s;
  }
  std::vector<double> nodes{0.0};
  for (std::size_t k = 0; k + 1 < N; ++k) nodes.push_back(nodes.back() + T * steps[k] / sum);
  nodes.push_back(T);
  return fracpf::TimeMesh(nodes);
}

}  // namespace oracle
