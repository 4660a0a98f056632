#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>

#include "fracpf/field.hpp"
#include "fracpf/frac_kernels.hpp"
#include "fracpf/random.hpp"

namespace fracpf {

/// Four touching drops of radius 0.2 centred at (+-0.3, 0) and (0, +-0.3):
/// -prod_i tanh((|x - c_i|^2 - 0.2^2) / eps).
inline Field2D init_four_drops(std::size_t M, Domain domain, double eps) {
  detail::require_param(eps > 0.0, "init_four_drops: epsilon must be positive");
  return Field2D::sample(M, domain, [eps](double x, double y) {
    auto f = [&](double cx, double cy) {
      return std::tanh(((x - cx) * (x - cx) + (y - cy) * (y - cy) - 0.04) / eps);
    };
    return -f(0.3, 0.0) * f(-0.3, 0.0) * f(0.0, 0.3) * f(0.0, -0.3);
  });
}

/// I.i.d. uniform values in [-amplitude, amplitude].
inline Field2D init_random(std::size_t M, Domain domain, double amplitude, std::uint64_t seed) {
  detail::require_param(amplitude >= 0.0, "init_random: amplitude must be >= 0");
  Field2D out(M, domain);
  CounterRng rng(seed);
  for (std::size_t p = 0; p < out.points(); ++p) out[p] = rng.next_in(-amplitude, amplitude);
  return out;
}

struct ManufacturedPair {
  Field2D phi;
  Field2D g;
};

/// phi = omega_{1+sigma}(t) sin x sin y and the source that makes it solve
/// D^alpha phi = -lambda (mu - eta) + g with mu = -eps^2 Lap phi + phi^3 - phi.
/// eta vanishes because mu has zero mean over a period cell.
inline ManufacturedPair manufactured_pair(double sigma, double alpha, double eps, double t, std::size_t M,
                                          Domain domain, double lambda = 1.0) {
  detail::require_param(sigma > 0.0, "manufactured_pair: sigma must be positive");
  detail::require_param(t >= 0.0, "manufactured_pair: t must be >= 0");
  const double a = omega(1.0 + sigma, t);
  const double da = t > 0.0 ? omega(1.0 + sigma - alpha, t) : 0.0;
  ManufacturedPair out{Field2D(M, domain), Field2D(M, domain)};
  for (std::size_t j = 0; j < M; ++j) {
    for (std::size_t i = 0; i < M; ++i) {
      const double s = std::sin(out.phi.x(i)) * std::sin(out.phi.y(j));
      const double p = a * s;
      out.phi(i, j) = p;
      out.g(i, j) = da * s + lambda * (p * p * p + (2.0 * eps * eps - 1.0) * p);
    }
  }
  return out;
}

}  // namespace fracpf
