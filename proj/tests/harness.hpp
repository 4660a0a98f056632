#pragma once

// Small drivers shared by the stepper, diagnostics and acceptance tests.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "fracpf/diagnostics.hpp"
#include "fracpf/random.hpp"
#include "fracpf/spectral_grid.hpp"
#include "fracpf/steppers.hpp"
#include "fracpf/time_mesh.hpp"

namespace harness {

using namespace fracpf;

inline const Domain kTorus{0.0, 2 * std::numbers::pi, 0.0, 2 * std::numbers::pi};

/// Smooth random field: a few random low Fourier modes plus an offset.
inline Field2D smooth_random(std::size_t M, Domain d, std::uint64_t seed, double amplitude = 0.8,
                             double offset = 0.1) {
  CounterRng rng(seed);
  const double lx = d.x1 - d.x0, ly = d.y1 - d.y0;
  Field2D f(M, d, offset);
  for (int kx = 0; kx <= 3; ++kx) {
    for (int ky = 0; ky <= 3; ++ky) {
      if (kx == 0 && ky == 0) continue;
      const double c = rng.next_in(-1.0, 1.0) * amplitude / (1 + kx * kx + ky * ky);
      const double sx = rng.next_in(0.0, 2 * std::numbers::pi), sy = rng.next_in(0.0, 2 * std::numbers::pi);
      for (std::size_t j = 0; j < M; ++j)
        for (std::size_t i = 0; i < M; ++i)
          f(i, j) += c * std::cos(2 * std::numbers::pi * kx * (f.x(i) - d.x0) / lx + sx) *
                     std::cos(2 * std::numbers::pi * ky * (f.y(j) - d.y0) / ly + sy);
    }
  }
  return f;
}

/// Random mesh whose adjacent step ratios reach max_ratio. log10 of the step
/// walks inside [-6, 0] relative to max_step, which is the first step.
inline TimeMesh abusive_mesh(std::uint64_t seed, std::size_t N, double max_ratio, double max_step) {
  CounterRng rng(seed);
  const double jump = std::log10(max_ratio);
  double s = 0.0;
  TimeMesh mesh;
  mesh.append_step(max_step);
  for (std::size_t k = 1; k < N; ++k) {
    // Every fourth step takes the full ratio, up or down.
    double ds = k % 4 == 0 ? (rng.next_open() < 0.5 ? -jump : jump) : rng.next_in(-jump, jump);
    if (s + ds > 0.0 || s + ds < -6.0) ds = -ds;
    s += ds;
    mesh.append_step(max_step * std::pow(10.0, s));
  }
  return mesh;
}

struct Trace {
  std::vector<double> E_modified;
  std::vector<double> volume;
  std::vector<Field2D> increments;
  double aux_error = 0.0;  // largest deviation from the auxiliary update identity
  int max_iterations = 0;
  double max_residual = 0.0;
};

/// Advance over every step of the mesh and record what the invariants need.
inline Trace run_steps(const PhaseFieldStepper& stepper, SpectralWorkspace& ws, const TimeMesh& mesh,
                       SchemeState& s, bool keep_increments = false,
                       const std::function<const Field2D*(std::size_t)>& source = {}) {
  Trace tr;
  const auto& p = stepper.params();
  const SchemeKind scheme = stepper.scheme();
  tr.E_modified.push_back(energy_modified(ws, s, scheme, p));
  tr.volume.push_back(volume(s.phi));
  while (s.n < mesh.steps()) {
    const std::size_t n = s.n + 1;
    const Field2D phi_hat = n == 1 ? s.phi : extrapolate(s.phi, s.last_increment, mesh.ratio(n - 1));
    const Field2D u_prev = s.u;
    const double v_prev = s.v;
    const StepInfo info = stepper.step(s, ws, mesh, source ? source(n) : nullptr);
    tr.max_iterations = std::max(tr.max_iterations, info.solver_iterations);
    tr.max_residual = std::max(tr.max_residual, info.residual);
    if (scheme == SchemeKind::ieq) {
      Field2D expect = u_prev;
      axpy(expect, 2.0, hadamard(phi_hat, s.last_increment));
      tr.aux_error = std::max(tr.aux_error, max_abs_diff(expect, s.u) / (1.0 + expect.max_abs()));
    } else {
      const double expect = v_prev + 0.5 * inner(sav_V(phi_hat, p.beta, p.C0), s.last_increment);
      tr.aux_error = std::max(tr.aux_error, std::abs(expect - s.v) / (1.0 + std::abs(expect)));
    }
    tr.E_modified.push_back(energy_modified(ws, s, scheme, p));
    tr.volume.push_back(volume(s.phi));
    if (keep_increments) tr.increments.push_back(s.last_increment);
  }
  return tr;
}

/// sum_n sum_{k<=n} a_{n-k}^{(n)} <incr_k, incr_n>, with the H^{-1} pairing
/// for the Cahn-Hilliard flow and L2 otherwise.
inline double field_quadratic_form(SpectralWorkspace& ws, const TimeMesh& mesh, double alpha,
                                   const std::vector<Field2D>& incr, bool h_minus_one) {
  std::vector<Field2D> paired;
  for (const auto& d : incr) {
    if (!h_minus_one) {
      paired.push_back(d);
      continue;
    }
    Spectrum s = ws.forward(d);
    const auto& k2 = ws.k2();
    for (std::size_t q = 0; q < s.size(); ++q) s[q] = k2[q] == 0.0 ? 0.0 : s[q] / k2[q];
    paired.push_back(ws.inverse(s));
  }
  double total = 0.0;
  for (std::size_t n = 1; n <= incr.size(); ++n)
    for (std::size_t k = 1; k <= n; ++k) total += l1plus_coeff(mesh, alpha, n, k) * inner(incr[k - 1], paired[n - 1]);
  return total;
}

}  // namespace harness
