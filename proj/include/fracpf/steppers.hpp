#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

#include "fracpf/errors.hpp"
#include "fracpf/fast_history.hpp"
#include "fracpf/field.hpp"
#include "fracpf/frac_kernels.hpp"
#include "fracpf/spectral_grid.hpp"
#include "fracpf/time_mesh.hpp"

namespace fracpf {

enum class ModelKind { allen_cahn, allen_cahn_conservative, cahn_hilliard };
enum class SchemeKind { ieq, sav };

inline std::string to_string(ModelKind m) {
  switch (m) {
    case ModelKind::allen_cahn: return "tfac";
    case ModelKind::allen_cahn_conservative: return "tfac_conservative";
    case ModelKind::cahn_hilliard: return "tfch";
  }
  return "?";
}

inline std::string to_string(SchemeKind s) { return s == SchemeKind::ieq ? "ieq" : "sav"; }

struct ModelParams {
  double alpha = 0.5;
  double lambda = 1.0;
  double epsilon = 0.1;
  double beta = 0.0;
  double C0 = 1.0;

  void validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
    if (!(beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    if (!(C0 > 0.0)) throw std::invalid_argument("C0 must be positive");
  }
};

struct SolverOptions {
  double cg_tolerance = 1e-12;
  int cg_max_iterations = 500;
  double closure_threshold = 1e-12;
  /// Drop the volume multiplier from the conservative Allen-Cahn flow.
  bool multiplier = true;
};

/// Everything carried between steps.
struct SchemeState {
  std::size_t n = 0;
  Field2D phi;             // phi^n
  Field2D last_increment;  // phi^n - phi^{n-1}; zero before the first step
  Field2D u;               // IEQ auxiliary field (u or q)
  double v = 0.0;          // SAV auxiliary scalar (v or r)
  IncrementHistory<Field2D> history;
};

struct StepInfo {
  int solver_iterations = 0;
  double residual = 0.0;
  double a0 = 0.0;
};

// -- Mobility policies: the operator applied to the chemical potential ------

/// -lambda (mu - eta): eta realized as the mean projection.
struct VolumeConstrainedAllenCahn {
  static constexpr bool conserving = true;
  static double symbol(double k2) { return k2 == 0.0 ? 0.0 : 1.0; }
  static double pseudo_inverse(double k2) { return k2 == 0.0 ? 0.0 : 1.0; }
};

/// -lambda mu.
struct PlainAllenCahn {
  static constexpr bool conserving = false;
  static double symbol(double) { return 1.0; }
  static double pseudo_inverse(double) { return 1.0; }
};

/// lambda Laplacian(mu).
struct CahnHilliard {
  static constexpr bool conserving = true;
  static double symbol(double k2) { return k2; }
  static double pseudo_inverse(double k2) { return k2 == 0.0 ? 0.0 : 1.0 / k2; }
};

// -- Auxiliary variables ----------------------------------------------------

/// phi^{n-1} + incr^{n-1} / (2 rho_{n-1}).
inline Field2D extrapolate(const Field2D& phi_prev, const Field2D& incr_prev, double rho_prev) {
  detail::require(rho_prev > 0.0, "extrapolate: step ratio must be positive");
  Field2D out = phi_prev;
  axpy(out, 0.5 / rho_prev, incr_prev);
  return out;
}

/// u(phi) = phi^2 - 1 - beta.
inline Field2D ieq_value(const Field2D& phi, double beta) {
  Field2D u = phi;
  for (double& x : u.values()) x = x * x - 1.0 - beta;
  return u;
}

/// sqrt( int (1/4)(phi^2 - 1 - beta)^2 + C0 ).
inline double sav_value(const Field2D& phi, double beta, double C0) {
  double s = 0.0;
  for (double x : phi.values()) {
    const double q = x * x - 1.0 - beta;
    s += 0.25 * q * q;
  }
  return std::sqrt(s * phi.cell_area() + C0);
}

/// V(phi) = (phi^2 - 1 - beta) phi / sav_value(phi).
inline Field2D sav_V(const Field2D& phi, double beta, double C0) {
  const double denom = sav_value(phi, beta, C0);
  Field2D out = phi;
  for (double& x : out.values()) x = (x * x - 1.0 - beta) * x / denom;
  return out;
}

inline SchemeState make_state(const Field2D& phi0, const ModelParams& p, IncrementHistory<Field2D> history) {
  detail::require(history.size() == 0, "make_state: history must be empty");
  return SchemeState{0, phi0, zero_like(phi0), ieq_value(phi0, p.beta), sav_value(phi0, p.beta, p.C0),
                     std::move(history)};
}

namespace detail {

struct StepSetup {
  std::size_t n;
  double a0;
  Field2D lagged;
  Field2D phi_hat;
};

inline StepSetup begin_step(const SchemeState& s, SpectralWorkspace& ws, const TimeMesh& mesh,
                            const ModelParams& p) {
  const std::size_t n = s.n + 1;
  if (n > mesh.steps()) throw std::out_of_range("step: mesh has no node for the next level");
  ws.check(s.phi);
  const double a0 = 1.0 / (std::tgamma(3.0 - p.alpha) * std::pow(mesh.step(n), p.alpha));
  Field2D phi_hat = n == 1 ? s.phi : extrapolate(s.phi, s.last_increment, mesh.ratio(n - 1));
  if (ws.dealias()) phi_hat = ws.truncate_two_thirds(phi_hat);
  return StepSetup{n, a0, s.history.lagged(mesh, n), std::move(phi_hat)};
}

inline void finish_step(SchemeState& s, const TimeMesh& mesh, std::size_t n, Field2D increment) {
  s.phi += increment;
  s.history.push(mesh, increment);
  s.last_increment = std::move(increment);
  s.n = n;
}

template <class Mobility>
void check_source(const Field2D* g) {
  if constexpr (std::is_same_v<Mobility, CahnHilliard>) {
    if (g) throw std::invalid_argument("Cahn-Hilliard steppers do not take a source term");
  }
}

}  // namespace detail

/// Crank-Nicolson SAV step n-1 -> n. The increment is d1 - (xi/4) d2 with
/// d1, d2 from two diagonal Fourier solves and xi = (V, increment) closed
/// from a scalar equation.
template <class Mobility>
StepInfo step_sav(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& mesh, const ModelParams& p,
                  const Field2D* g = nullptr, const SolverOptions& opt = {}) {
  detail::check_source<Mobility>(g);
  auto [n, a0, lagged, phi_hat] = detail::begin_step(s, ws, mesh, p);
  const Field2D V = sav_V(phi_hat, p.beta, p.C0);
  const double lam = p.lambda;
  const double eps2 = p.epsilon * p.epsilon;

  const Spectrum phi_s = ws.forward(s.phi);
  const Spectrum V_s = ws.forward(V);
  const Spectrum H_s = ws.forward(lagged);
  const Spectrum g_s = g ? ws.forward(*g) : Spectrum(ws.modes());
  const auto& k2 = ws.k2();

  Spectrum d1(ws.modes());
  Spectrum d2(ws.modes());
  for (std::size_t q = 0; q < ws.modes(); ++q) {
    const double m = Mobility::symbol(k2[q]);
    const double L = a0 + lam * m * (0.5 * p.beta + 0.5 * eps2 * k2[q]);
    std::complex<double> rhs = g_s[q] - H_s[q] - lam * m * ((p.beta + eps2 * k2[q]) * phi_s[q] + s.v * V_s[q]);
    // The zero mode follows the volume law alone: unchanged without a source.
    if (Mobility::conserving && q == 0) rhs = g ? g_s[q] - H_s[q] : 0.0;
    d1[q] = rhs / L;
    d2[q] = lam * m * V_s[q] / L;
  }
  const Field2D f1 = ws.inverse(d1);
  const Field2D f2 = ws.inverse(d2);
  const double c1 = inner(V, f1);
  const double c2 = inner(V, f2);
  const double denom = 1.0 + 0.25 * c2;
  if (std::abs(denom) < opt.closure_threshold) throw StepFailure("step_sav: degenerate scalar closure");
  const double xi = c1 / denom;

  Field2D increment = f1;
  axpy(increment, -0.25 * xi, f2);
  s.v += 0.5 * inner(V, increment);
  detail::finish_step(s, mesh, n, std::move(increment));
  return StepInfo{0, 0.0, a0};
}

namespace detail {

struct CgResult {
  Field2D x;
  int iterations;
  double residual;
};

// Preconditioned conjugate gradients; apply and precondition are SPD on the
// subspace they act on.
template <class Apply, class Precondition>
CgResult pcg(Apply&& apply, Precondition&& precondition, const Field2D& b, double tol, int max_iter) {
  auto dot = [](const Field2D& a, const Field2D& c) {
    double s = 0.0;
    for (std::size_t q = 0; q < a.points(); ++q) s += a[q] * c[q];
    return s;
  };
  const double bnorm = std::sqrt(dot(b, b));
  Field2D x = zero_like(b);
  if (bnorm == 0.0) return CgResult{x, 0, 0.0};

  Field2D r = b;
  Field2D z = precondition(r);
  Field2D d = z;
  double rz = dot(r, z);
  for (int it = 1; it <= max_iter; ++it) {
    const Field2D Kd = apply(d);
    const double step = rz / dot(d, Kd);
    axpy(x, step, d);
    axpy(r, -step, Kd);
    const double rel = std::sqrt(dot(r, r)) / bnorm;
    if (rel <= tol) {
      // Confirm against the true residual.
      Field2D true_r = b - apply(x);
      const double true_rel = std::sqrt(dot(true_r, true_r)) / bnorm;
      if (true_rel <= tol) return CgResult{std::move(x), it, true_rel};
      r = std::move(true_r);
    }
    z = precondition(r);
    const double rz_new = dot(r, z);
    scale_add(d, rz_new / rz, 1.0, z);
    rz = rz_new;
  }
  throw StepFailure("step_ieq: conjugate gradients did not converge");
}

}  // namespace detail

/// Crank-Nicolson IEQ step n-1 -> n. Eliminating u^{n-1/2} = u^{n-1} + phi_hat incr
/// leaves a variable-coefficient SPD system for the increment, solved by PCG
/// with a constant-coefficient Fourier preconditioner.
template <class Mobility>
StepInfo step_ieq(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& mesh, const ModelParams& p,
                  const Field2D* g = nullptr, const SolverOptions& opt = {}) {
  detail::check_source<Mobility>(g);
  auto [n, a0, lagged, phi_hat] = detail::begin_step(s, ws, mesh, p);
  const double lam = p.lambda;
  const double eps2 = p.epsilon * p.epsilon;
  const Field2D phi_hat_sq = hadamard(phi_hat, phi_hat);
  const auto& k2 = ws.k2();

  // Mean of the increment, fixed by the volume law for conserving flows.
  double shift = 0.0;
  if constexpr (Mobility::conserving) shift = g ? (mean(*g) - mean(lagged)) / a0 : 0.0;

  auto range = [](std::size_t q) { return !(Mobility::conserving && q == 0); };

  Field2D local = hadamard(phi_hat, s.u);
  axpy(local, shift, phi_hat_sq);
  const Spectrum local_s = ws.forward(local);
  const Spectrum phi_s = ws.forward(s.phi);
  const Spectrum H_s = ws.forward(lagged);
  const Spectrum g_s = g ? ws.forward(*g) : Spectrum(ws.modes());
  Spectrum b_s(ws.modes());
  for (std::size_t q = 0; q < ws.modes(); ++q) {
    if (!range(q)) continue;
    b_s[q] = Mobility::pseudo_inverse(k2[q]) * (g_s[q] - H_s[q]) -
             lam * ((p.beta + eps2 * k2[q]) * phi_s[q] + local_s[q]);
  }
  const Field2D b = ws.inverse(b_s);

  auto apply = [&](const Field2D& x) {
    Spectrum xs = ws.forward(x);
    const Spectrum dx = ws.forward(hadamard(phi_hat_sq, x));
    for (std::size_t q = 0; q < xs.size(); ++q) {
      if (!range(q)) {
        xs[q] = 0.0;
        continue;
      }
      xs[q] = (a0 * Mobility::pseudo_inverse(k2[q]) + lam * (0.5 * p.beta + 0.5 * eps2 * k2[q])) * xs[q] +
              lam * dx[q];
    }
    return ws.inverse(xs);
  };
  const double cbar = mean(phi_hat_sq);
  auto precondition = [&](const Field2D& r) {
    Spectrum rs = ws.forward(r);
    for (std::size_t q = 0; q < rs.size(); ++q) {
      if (!range(q)) {
        rs[q] = 0.0;
        continue;
      }
      rs[q] /= a0 * Mobility::pseudo_inverse(k2[q]) + lam * (0.5 * p.beta + cbar + 0.5 * eps2 * k2[q]);
    }
    return ws.inverse(rs);
  };

  auto [x, iterations, residual] = detail::pcg(apply, precondition, b, opt.cg_tolerance, opt.cg_max_iterations);
  x += shift;
  Field2D du = hadamard(phi_hat, x);
  axpy(s.u, 2.0, du);
  detail::finish_step(s, mesh, n, std::move(x));
  return StepInfo{iterations, residual, a0};
}

// Named entry points for the five scheme/model pairs plus the plain SAV/IEQ Allen-Cahn.
inline StepInfo step_tfac_sav(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& m, const ModelParams& p,
                              const Field2D* g = nullptr, const SolverOptions& o = {}) {
  return step_sav<VolumeConstrainedAllenCahn>(s, ws, m, p, g, o);
}
inline StepInfo step_tfac_ieq(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& m, const ModelParams& p,
                              const Field2D* g = nullptr, const SolverOptions& o = {}) {
  return step_ieq<VolumeConstrainedAllenCahn>(s, ws, m, p, g, o);
}
inline StepInfo step_tfac_plain_sav(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& m,
                                    const ModelParams& p, const Field2D* g = nullptr, const SolverOptions& o = {}) {
  return step_sav<PlainAllenCahn>(s, ws, m, p, g, o);
}
inline StepInfo step_tfac_plain_ieq(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& m,
                                    const ModelParams& p, const Field2D* g = nullptr, const SolverOptions& o = {}) {
  return step_ieq<PlainAllenCahn>(s, ws, m, p, g, o);
}
inline StepInfo step_tfch_sav(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& m, const ModelParams& p,
                              const SolverOptions& o = {}) {
  return step_sav<CahnHilliard>(s, ws, m, p, nullptr, o);
}
inline StepInfo step_tfch_ieq(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& m, const ModelParams& p,
                              const SolverOptions& o = {}) {
  return step_ieq<CahnHilliard>(s, ws, m, p, nullptr, o);
}

/// Runtime-selected stepper used by the experiment driver.
class PhaseFieldStepper {
 public:
  PhaseFieldStepper(ModelKind model, SchemeKind scheme, ModelParams params, SolverOptions options = {})
      : model_(model), scheme_(scheme), params_(params), options_(options) {
    params_.validate();
  }

  StepInfo step(SchemeState& s, SpectralWorkspace& ws, const TimeMesh& mesh, const Field2D* g = nullptr) const {
    ModelKind effective = model_;
    if (effective == ModelKind::allen_cahn_conservative && !options_.multiplier) effective = ModelKind::allen_cahn;
    switch (effective) {
      case ModelKind::allen_cahn_conservative:
        return scheme_ == SchemeKind::sav ? step_sav<VolumeConstrainedAllenCahn>(s, ws, mesh, params_, g, options_)
                                          : step_ieq<VolumeConstrainedAllenCahn>(s, ws, mesh, params_, g, options_);
      case ModelKind::allen_cahn:
        return scheme_ == SchemeKind::sav ? step_sav<PlainAllenCahn>(s, ws, mesh, params_, g, options_)
                                          : step_ieq<PlainAllenCahn>(s, ws, mesh, params_, g, options_);
      case ModelKind::cahn_hilliard:
        return scheme_ == SchemeKind::sav ? step_sav<CahnHilliard>(s, ws, mesh, params_, g, options_)
                                          : step_ieq<CahnHilliard>(s, ws, mesh, params_, g, options_);
    }
    throw std::logic_error("unknown model");
  }

  ModelKind model() const { return model_; }
  SchemeKind scheme() const { return scheme_; }
  const ModelParams& params() const { return params_; }
  const SolverOptions& options() const { return options_; }

 private:
  ModelKind model_;
  SchemeKind scheme_;
  ModelParams params_;
  SolverOptions options_;
};

}  // namespace fracpf
