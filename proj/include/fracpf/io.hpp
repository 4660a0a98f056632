#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracpf/config.hpp"
#include "fracpf/diagnostics.hpp"
#include "fracpf/field.hpp"
#include "fracpf/time_mesh.hpp"

namespace fracpf {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Shortest form is not needed; 17 significant digits always round-trip.
inline std::string fmt17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace detail

// -- Snapshots ---------------------------------------------------------------
//
// # t=<time> nx=<M> ny=<M> domain=<x0,x1,y0,y1>
// then M rows (one per y_j) of M values.

struct Snapshot {
  double t = 0.0;
  Field2D phi;
};

inline void write_snapshot(std::ostream& out, double t, const Field2D& phi) {
  const Domain& d = phi.domain();
  const std::size_t M = phi.size();
  out << "# t=" << detail::fmt17(t) << " nx=" << M << " ny=" << M << " domain=" << detail::fmt17(d.x0) << ','
      << detail::fmt17(d.x1) << ',' << detail::fmt17(d.y0) << ',' << detail::fmt17(d.y1) << '\n';
  for (std::size_t j = 0; j < M; ++j) {
    for (std::size_t i = 0; i < M; ++i) {
      if (i) out << ' ';
      out << detail::fmt17(phi(i, j));
    }
    out << '\n';
  }
}

inline void write_snapshot(const std::filesystem::path& path, double t, const Field2D& phi) {
  auto out = detail::open_out(path);
  write_snapshot(out, t, phi);
  if (!out) throw IoError("write failed: '" + path.string() + "'");
}

inline Snapshot read_snapshot(std::istream& in) {
  std::string header;
  if (!std::getline(in, header) || header.rfind("# ", 0) != 0) throw IoError("snapshot: missing header");
  double t = 0.0;
  std::size_t nx = 0, ny = 0;
  Domain d;
  std::istringstream hs(header.substr(2));
  std::string tok;
  bool have_t = false, have_nx = false, have_ny = false, have_d = false;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw IoError("snapshot: bad header token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    try {
      if (key == "t") {
        t = detail::parse_double(key, val);
        have_t = true;
      } else if (key == "nx") {
        nx = detail::parse_uint(key, val);
        have_nx = true;
      } else if (key == "ny") {
        ny = detail::parse_uint(key, val);
        have_ny = true;
      } else if (key == "domain") {
        const auto v = detail::parse_list(key, val);
        if (v.size() != 4) throw IoError("snapshot: domain needs four numbers");
        d = Domain{v[0], v[1], v[2], v[3]};
        have_d = true;
      } else {
        throw IoError("snapshot: unknown header key '" + key + "'");
      }
    } catch (const ConfigError& e) {
      throw IoError(std::string("snapshot: ") + e.what());
    }
  }
  if (!(have_t && have_nx && have_ny && have_d)) throw IoError("snapshot: incomplete header");
  if (nx != ny) throw IoError("snapshot: only square grids are supported");
  Field2D phi(nx, d);
  for (std::size_t j = 0; j < ny; ++j) {
    std::string line;
    if (!std::getline(in, line)) throw IoError("snapshot: truncated data");
    std::istringstream ls(line);
    for (std::size_t i = 0; i < nx; ++i) {
      std::string v;
      if (!(ls >> v)) throw IoError("snapshot: short row " + std::to_string(j));
      try {
        phi(i, j) = detail::parse_double("value", v);
      } catch (const ConfigError& e) {
        throw IoError(std::string("snapshot: ") + e.what());
      }
    }
    std::string extra;
    if (ls >> extra) throw IoError("snapshot: long row " + std::to_string(j));
  }
  return Snapshot{t, std::move(phi)};
}

inline Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return read_snapshot(in);
}

// -- Energy log --------------------------------------------------------------

inline constexpr const char* kEnergyHeader = "n,t,tau,E_original,E_modified,volume,solver_iters";

inline void write_energy_row(std::ostream& out, const EnergyRecord& r) {
  out << r.n << ',' << detail::fmt17(r.t) << ',' << detail::fmt17(r.tau) << ',' << detail::fmt17(r.E_original) << ','
      << detail::fmt17(r.E_modified) << ',' << detail::fmt17(r.volume) << ',' << r.solver_iters << '\n';
}

inline void write_energy_csv(const std::filesystem::path& path, const std::vector<EnergyRecord>& log) {
  auto out = detail::open_out(path);
  out << kEnergyHeader << '\n';
  for (const auto& r : log) write_energy_row(out, r);
  if (!out) throw IoError("write failed: '" + path.string() + "'");
}

inline std::vector<EnergyRecord> read_energy_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kEnergyHeader) throw IoError("energy csv: unexpected header");
  std::vector<EnergyRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cells.push_back(c);
    if (cells.size() != 7) throw IoError("energy csv: expected 7 columns");
    try {
      EnergyRecord r;
      r.n = detail::parse_uint("n", cells[0]);
      r.t = detail::parse_double("t", cells[1]);
      r.tau = detail::parse_double("tau", cells[2]);
      r.E_original = detail::parse_double("E_original", cells[3]);
      r.E_modified = detail::parse_double("E_modified", cells[4]);
      r.volume = detail::parse_double("volume", cells[5]);
      r.solver_iters = static_cast<int>(detail::parse_uint("solver_iters", cells[6]));
      out.push_back(r);
    } catch (const ConfigError& e) {
      throw IoError(std::string("energy csv: ") + e.what());
    }
  }
  return out;
}

inline std::vector<EnergyRecord> read_energy_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return read_energy_csv(in);
}

// -- Mesh --------------------------------------------------------------------

inline void write_mesh_csv(std::ostream& out, const TimeMesh& mesh) {
  out << "k,t_k,tau_k\n";
  out << "0," << detail::fmt17(0.0) << ",\n";
  for (std::size_t k = 1; k <= mesh.steps(); ++k)
    out << k << ',' << detail::fmt17(mesh.node(k)) << ',' << detail::fmt17(mesh.step(k)) << '\n';
}

inline void write_mesh_csv(const std::filesystem::path& path, const TimeMesh& mesh) {
  auto out = detail::open_out(path);
  write_mesh_csv(out, mesh);
}

// -- Metadata ----------------------------------------------------------------

inline nlohmann::json config_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["model"] = {{"kind", to_string(c.model)},         {"scheme", to_string(c.scheme)},
                {"alpha", c.params.alpha},            {"lambda", c.params.lambda},
                {"epsilon", c.params.epsilon},        {"beta", c.params.beta},
                {"C0", c.params.C0},                  {"multiplier", c.multiplier}};
  j["grid"] = {{"M", c.M}, {"domain", {c.domain.x0, c.domain.x1, c.domain.y0, c.domain.y1}}, {"dealias", c.dealias}};
  j["initial"] = {{"kind", to_string(c.initial)}, {"amplitude", c.amplitude}, {"value", c.value},
                  {"seed", c.initial_seed}};
  j["source"] = {{"kind", to_string(c.source)}, {"sigma", c.sigma}};
  j["mesh"] = {{"T", c.T},         {"T0", c.T0},          {"N0", c.N0},
               {"gamma", c.gamma}, {"continuation", to_string(c.continuation)},
               {"N1", c.N1},       {"seed", c.mesh_seed}, {"kappa", c.kappa},
               {"tau_min", c.tau_min}, {"tau_max", c.tau_max}};
  j["history"] = {{"mode", to_string(c.history)}, {"tol", c.soe_tol}};
  j["output"] = {{"dir", c.out_dir}, {"snapshots", c.snapshot_times}};
  j["raw"] = c.raw;
  return j;
}

inline void write_metadata(const std::filesystem::path& path, const nlohmann::json& meta) {
  auto out = detail::open_out(path);
  out << meta.dump(2) << '\n';
}

}  // namespace fracpf
