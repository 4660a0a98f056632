#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracpf/config.hpp"
#include "fracpf/diagnostics.hpp"
#include "fracpf/fast_history.hpp"
#include "fracpf/initial.hpp"
#include "fracpf/io.hpp"
#include "fracpf/soe.hpp"
#include "fracpf/spectral_grid.hpp"
#include "fracpf/steppers.hpp"
#include "fracpf/time_mesh.hpp"

#ifndef FRACPF_VERSION
#define FRACPF_VERSION "0.0.0"
#endif

namespace fracpf {

inline constexpr const char* version() { return FRACPF_VERSION; }

/// Called after the initial state (n = 0) and after every accepted step.
using RunObserver = std::function<void(const SchemeState&, const TimeMesh&)>;

struct SnapshotRecord {
  double requested = 0.0;
  double t = 0.0;
  std::size_t n = 0;
  std::string file;
};

struct RunResult {
  TimeMesh mesh;
  std::vector<EnergyRecord> log;  // one row per level, n = 0 included
  Field2D phi;
  std::vector<SnapshotRecord> snapshots;
  std::size_t soe_terms = 0;
  std::size_t rejected_steps = 0;
  std::optional<double> max_error;  // manufactured runs: max_n |phi^n - phi(t_n)|_inf
  double wall_seconds = 0.0;

  std::size_t steps() const { return mesh.steps(); }
};

/// Mesh for non-adaptive continuations: graded prefix on [0, T0] plus the continuation.
inline TimeMesh planned_mesh(const ExperimentConfig& c) {
  TimeMesh mesh = build_graded(c.T0, c.N0, c.gamma);
  if (c.T <= c.T0) return mesh;
  switch (c.continuation) {
    case Continuation::none: return mesh;
    case Continuation::uniform: return extend_uniform(mesh, c.T, c.N1);
    case Continuation::random: return extend_random(mesh, c.T, c.N1, c.mesh_seed);
    case Continuation::adaptive: throw ConfigError("adaptive meshes are only known after the run");
  }
  return mesh;
}

inline Field2D initial_field(const ExperimentConfig& c) {
  switch (c.initial) {
    case InitialKind::four_drops: return init_four_drops(c.M, c.domain, c.params.epsilon);
    case InitialKind::random: return init_random(c.M, c.domain, c.amplitude, c.initial_seed);
    case InitialKind::manufactured:
      return manufactured_pair(c.sigma, c.params.alpha, c.params.epsilon, 0.0, c.M, c.domain, c.params.lambda).phi;
    case InitialKind::constant: return Field2D(c.M, c.domain, c.value);
  }
  throw ConfigError("unknown initial condition");
}

namespace detail {

inline bool manufactured_run(const ExperimentConfig& c) {
  return c.initial == InitialKind::manufactured && c.source == SourceKind::manufactured;
}

class RunWriter {
 public:
  explicit RunWriter(const ExperimentConfig& c) : dir_(c.out_dir) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  bool enabled() const { return !dir_.empty(); }
  const std::filesystem::path& dir() const { return dir_; }

  std::string snapshot(std::size_t index, double t, const Field2D& phi) const {
    if (!enabled()) return {};
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.txt", index);
    write_snapshot(dir_ / name, t, phi);
    return name;
  }

 private:
  std::filesystem::path dir_;
};

}  // namespace detail

inline nlohmann::json run_metadata(const ExperimentConfig& c, const RunResult& r, const std::string& status) {
  nlohmann::json meta;
  meta["version"] = version();
  meta["status"] = status;
  meta["config"] = config_json(c);
  meta["seeds"] = {{"initial", c.initial_seed}, {"mesh", c.mesh_seed}};
  meta["steps"] = r.steps();
  meta["rejected_steps"] = r.rejected_steps;
  meta["final_time"] = r.mesh.final_time();
  meta["soe_terms"] = r.soe_terms;
  meta["wall_seconds"] = r.wall_seconds;
  if (r.max_error) meta["max_error"] = *r.max_error;
  nlohmann::json snaps = nlohmann::json::array();
  for (const auto& s : r.snapshots) snaps.push_back({{"requested", s.requested}, {"t", s.t}, {"n", s.n}, {"file", s.file}});
  meta["snapshots"] = snaps;
  return meta;
}

/// Advance the configured experiment to T. Writes energy.csv, mesh.csv,
/// snapshots and metadata.json when an output directory is set.
inline RunResult run(const ExperimentConfig& c, const RunObserver& observer = {}) {
  c.validate();
  const auto clock_start = std::chrono::steady_clock::now();
  const bool adaptive = c.continuation == Continuation::adaptive && c.T > c.T0;

  RunResult res;
  res.mesh = adaptive ? build_graded(c.T0, c.N0, c.gamma) : planned_mesh(c);
  TimeMesh& mesh = res.mesh;

  SolverOptions opt;
  opt.multiplier = c.multiplier;
  const PhaseFieldStepper stepper(c.model, c.scheme, c.params, opt);
  SpectralWorkspace ws(c.M, c.domain, c.dealias);
  const ModelParams& p = c.params;

  Field2D phi0 = initial_field(c);
  auto history = IncrementHistory<Field2D>::direct(p.alpha, zero_like(phi0));
  if (c.history == HistoryMode::fast) {
    // Every lag the history sees is at least the smallest step before the last one.
    double delta = mesh.min_step();
    if (adaptive) delta = std::min(delta, c.tau_min / 256.0);
    auto soe = std::make_shared<const SoeApproximation>(soe_build(p.alpha, c.soe_tol, delta, c.T));
    res.soe_terms = soe->size();
    history = IncrementHistory<Field2D>::fast(p.alpha, std::move(soe), zero_like(phi0));
  }
  SchemeState state = make_state(phi0, p, std::move(history));

  const detail::RunWriter writer(c);
  std::vector<double> pending = c.snapshot_times;
  std::sort(pending.begin(), pending.end());
  std::size_t next_snap = 0;
  const double t_slack = 1e-12 * std::max(1.0, c.T);

  const bool manufactured = detail::manufactured_run(c);
  if (manufactured) res.max_error = 0.0;

  AdaptiveController ctrl = adaptive ? AdaptiveController(c.kappa, c.tau_min, c.tau_max) : AdaptiveController(0.0, 1.0, 1.0);

  auto record = [&](int iters) {
    const std::size_t n = state.n;
    const double t = mesh.node(n);
    EnergyRecord r{n,
                   t,
                   n == 0 ? 0.0 : mesh.step(n),
                   energy_original(ws, state.phi, p.epsilon),
                   energy_modified(ws, state, c.scheme, p),
                   volume(state.phi),
                   iters};
    for (double v : {r.E_original, r.E_modified, r.volume})
      if (!std::isfinite(v)) throw StepFailure("non-finite diagnostics at step " + std::to_string(n));
    res.log.push_back(r);
    ctrl.record(t, r.E_original);
    while (next_snap < pending.size() && t + t_slack >= pending[next_snap]) {
      res.snapshots.push_back(SnapshotRecord{pending[next_snap], t, n, writer.snapshot(next_snap, t, state.phi)});
      ++next_snap;
    }
    if (manufactured) {
      const auto exact = manufactured_pair(c.sigma, p.alpha, p.epsilon, t, c.M, c.domain, p.lambda);
      res.max_error = std::max(*res.max_error, max_abs_diff(state.phi, exact.phi));
    }
    if (observer) observer(state, mesh);
  };

  auto source_at = [&](std::size_t n) -> std::optional<Field2D> {
    if (c.source != SourceKind::manufactured) return std::nullopt;
    const double t_mid = 0.5 * (mesh.node(n - 1) + mesh.node(n));
    return manufactured_pair(c.sigma, p.alpha, p.epsilon, t_mid, c.M, c.domain, p.lambda).g;
  };

  auto take_step = [&] {
    const auto g = source_at(state.n + 1);
    const StepInfo info = stepper.step(state, ws, mesh, g ? &*g : nullptr);
    if (!state.phi.finite()) throw StepFailure("non-finite solution at step " + std::to_string(state.n));
    record(info.solver_iterations);
  };

  auto finish = [&](const std::string& status) {
    res.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - clock_start).count();
    if (!writer.enabled()) return;
    write_energy_csv(writer.dir() / "energy.csv", res.log);
    write_mesh_csv(writer.dir() / "mesh.csv", mesh);
    write_metadata(writer.dir() / "metadata.json", run_metadata(c, res, status));
  };

  try {
    record(0);
    const std::size_t planned = mesh.steps();
    while (state.n < planned) take_step();

    if (adaptive) {
      constexpr int kMaxHalvings = 8;
      while (mesh.final_time() < c.T) {
        const double t = mesh.final_time();
        double tau = ctrl.next_step();
        for (int attempt = 0;; ++attempt) {
          const bool last = t + tau >= c.T - t_slack;
          if (last) {
            mesh.append_node(c.T);
          } else {
            mesh.append_step(tau);
          }
          try {
            take_step();
            break;
          } catch (const StepFailure&) {
            // The steppers do not touch the state before failing.
            if (state.n == mesh.steps() || attempt == kMaxHalvings) throw;
            mesh.truncate(state.n);
            ++res.rejected_steps;
            tau = 0.5 * std::min(tau, c.T - t);
          }
        }
      }
    }
  } catch (const std::exception& e) {
    res.phi = state.phi;
    mesh.truncate(state.n);
    if (writer.enabled()) write_snapshot(writer.dir() / "failure_state.txt", mesh.final_time(), state.phi);
    finish(std::string("failed: ") + e.what());
    throw StepFailure("run aborted after step " + std::to_string(state.n) + " (t=" +
                      detail::fmt17(mesh.final_time()) + "): " + e.what());
  }

  res.phi = state.phi;
  finish("ok");
  return res;
}

// -- Convergence study ---------------------------------------------------------

struct ConvergenceRow {
  double gamma = 0.0;
  std::size_t N = 0;
  double tau = 0.0;  // maximum step
  double error = 0.0;
  std::optional<double> order;  // two-level order against the previous row
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  /// Least-squares order over the finest three levels, one per gamma.
  std::vector<std::pair<double, double>> fitted;
};

/// Manufactured-solution sweep: for each gamma and N, a graded prefix of N/2
/// steps on [0, min(1/gamma, T)] followed by a seeded random continuation.
inline ConvergenceTable convergence_study(const ExperimentConfig& base, const std::vector<double>& gammas,
                                          const std::vector<std::size_t>& levels) {
  if (gammas.empty() || levels.size() < 2) throw ConfigError("converge: need gammas and at least two levels");
  ConvergenceTable table;
  for (double gamma : gammas) {
    std::vector<double> errs, taus;
    for (std::size_t N : levels) {
      if (N < 2) throw ConfigError("converge: levels must be >= 2");
      ExperimentConfig c = base;
      c.initial = InitialKind::manufactured;
      c.source = SourceKind::manufactured;
      c.gamma = gamma;
      c.T0 = std::min(1.0 / gamma, c.T);
      c.N0 = N / 2;
      c.N1 = N - c.N0;
      c.continuation = c.T0 < c.T ? Continuation::random : Continuation::none;
      c.out_dir.clear();
      c.snapshot_times.clear();
      const RunResult r = run(c);
      ConvergenceRow row{gamma, N, r.mesh.max_step(), *r.max_error, std::nullopt};
      if (!errs.empty()) row.order = max_error_and_order(std::vector{errs.back(), row.error},
                                                         std::vector{taus.back(), row.tau})[0];
      errs.push_back(row.error);
      taus.push_back(row.tau);
      table.rows.push_back(row);
    }
    const std::size_t k = std::min<std::size_t>(3, errs.size());
    table.fitted.emplace_back(gamma, fitted_order(std::span(errs).last(k), std::span(taus).last(k)));
  }
  return table;
}

inline void write_convergence_csv(std::ostream& out, const ConvergenceTable& t) {
  out << "gamma,N,tau,error,order\n";
  for (const auto& r : t.rows) {
    out << detail::fmt17(r.gamma) << ',' << r.N << ',' << detail::fmt17(r.tau) << ',' << detail::fmt17(r.error) << ',';
    if (r.order) out << detail::fmt17(*r.order);
    out << '\n';
  }
}

}  // namespace fracpf
