#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracpf/field.hpp"
#include "fracpf/spectral_grid.hpp"
#include "fracpf/steppers.hpp"
#include "fracpf/time_mesh.hpp"

namespace fracpf {

struct EnergyRecord {
  std::size_t n = 0;
  double t = 0.0;
  double tau = 0.0;
  double E_original = 0.0;
  double E_modified = 0.0;
  double volume = 0.0;
  int solver_iters = 0;
};

/// int (eps^2/2)|grad phi|^2 + (1/4)(1 - phi^2)^2.
inline double energy_original(SpectralWorkspace& ws, const Field2D& phi, double eps) {
  double bulk = 0.0;
  for (double x : phi.values()) {
    const double q = 1.0 - x * x;
    bulk += 0.25 * q * q;
  }
  return 0.5 * eps * eps * ws.grad_sq_integral(phi) + bulk * phi.cell_area();
}

namespace detail {
inline double quadratic_part(SpectralWorkspace& ws, const Field2D& phi, const ModelParams& p) {
  const double omega = phi.domain().area();
  return 0.5 * p.epsilon * p.epsilon * ws.grad_sq_integral(phi) + 0.5 * p.beta * inner(phi, phi) -
         (0.5 * p.beta + 0.25 * p.beta * p.beta) * omega;
}
}  // namespace detail

/// Modified energy of the IEQ schemes.
inline double energy_ieq(SpectralWorkspace& ws, const Field2D& phi, const Field2D& u, const ModelParams& p) {
  return detail::quadratic_part(ws, phi, p) + 0.25 * inner(u, u);
}

/// Modified energy of the SAV schemes.
inline double energy_sav(SpectralWorkspace& ws, const Field2D& phi, double v, const ModelParams& p) {
  return detail::quadratic_part(ws, phi, p) + v * v - p.C0;
}

inline double energy_modified(SpectralWorkspace& ws, const SchemeState& s, SchemeKind scheme,
                              const ModelParams& p) {
  return scheme == SchemeKind::ieq ? energy_ieq(ws, s.phi, s.u, p) : energy_sav(ws, s.phi, s.v, p);
}

inline double volume(const Field2D& phi) { return integral(phi); }

struct PowerLawFit {
  double beta0 = 0.0;  // intercept
  double beta = 0.0;   // decay exponent: log10 E = beta0 - beta log10 t
  std::size_t points = 0;
};

/// Least squares in log10-log10 coordinates over t in [t_min, t_max].
inline PowerLawFit fit_power_law(std::span<const double> times, std::span<const double> energies, double t_min = 1.0,
                                 double t_max = std::numeric_limits<double>::infinity()) {
  if (times.size() != energies.size()) throw std::invalid_argument("fit_power_law: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min || times[i] > t_max) continue;
    if (!(times[i] > 0.0) || !(energies[i] > 0.0))
      throw std::invalid_argument("fit_power_law: times and energies must be positive");
    const double x = std::log10(times[i]);
    const double y = std::log10(energies[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw std::invalid_argument("fit_power_law: fewer than two points in the window");
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::invalid_argument("fit_power_law: degenerate time window");
  const double slope = (m * sxy - sx * sy) / denom;
  return PowerLawFit{(sy - slope * sx) / m, -slope, m};
}

/// Two-level orders log(e_i / e_{i+1}) / log(tau_i / tau_{i+1}).
inline std::vector<double> max_error_and_order(std::span<const double> errors, std::span<const double> taus) {
  if (errors.size() != taus.size()) throw std::invalid_argument("max_error_and_order: length mismatch");
  std::vector<double> orders;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i)
    orders.push_back(std::log(errors[i] / errors[i + 1]) / std::log(taus[i] / taus[i + 1]));
  return orders;
}

namespace detail {
// Ordinary least-squares slope of y against x.
inline double ls_slope(std::span<const double> x, std::span<const double> y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}
}  // namespace detail

/// Least-squares slope of log e against log tau over several levels.
inline double fitted_order(std::span<const double> errors, std::span<const double> taus) {
  if (errors.size() != taus.size() || errors.size() < 2)
    throw std::invalid_argument("fitted_order: need at least two matching levels");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < errors.size(); ++i) {
    x.push_back(std::log(taus[i]));
    y.push_back(std::log(errors[i]));
  }
  return detail::ls_slope(x, y);
}

/// Slope of log|(phi^k - phi^{k-1})/tau_k| against log t_{k-1/2} for k = 1..k_end.
/// values[k] is phi at t_k for one probe point.
inline double singularity_slope(const TimeMesh& mesh, std::span<const double> values, std::size_t k_end) {
  if (values.size() < k_end + 1 || k_end > mesh.steps() || k_end < 2)
    throw std::invalid_argument("singularity_slope: need at least two steps of data");
  std::vector<double> x, y;
  for (std::size_t k = 1; k <= k_end; ++k) {
    const double q = std::abs(values[k] - values[k - 1]) / mesh.step(k);
    if (!(q > 0.0)) throw std::domain_error("singularity_slope: zero increment, slope undefined");
    x.push_back(std::log(0.5 * (mesh.node(k) + mesh.node(k - 1))));
    y.push_back(std::log(q));
  }
  return detail::ls_slope(x, y);
}

}  // namespace fracpf
