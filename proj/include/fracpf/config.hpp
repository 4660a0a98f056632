#pragma once

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fracpf/errors.hpp"
#include "fracpf/field.hpp"
#include "fracpf/steppers.hpp"

namespace fracpf {

enum class InitialKind { four_drops, random, manufactured, constant };
enum class SourceKind { none, manufactured };
enum class Continuation { none, uniform, random, adaptive };

struct ExperimentConfig {
  // [model]
  ModelKind model = ModelKind::allen_cahn_conservative;
  SchemeKind scheme = SchemeKind::sav;
  ModelParams params{};
  bool multiplier = true;

  // [grid]
  std::size_t M = 64;
  Domain domain{-1.0, 1.0, -1.0, 1.0};
  bool dealias = false;

  // [initial]
  InitialKind initial = InitialKind::four_drops;
  double amplitude = 1e-3;
  double value = 0.0;
  std::uint64_t initial_seed = 1;

  // [source]
  SourceKind source = SourceKind::none;
  double sigma = 0.4;

  // [mesh]
  double T = 1.0;
  double T0 = 0.01;
  std::size_t N0 = 30;
  double gamma = 3.0;
  Continuation continuation = Continuation::none;
  std::size_t N1 = 0;
  std::uint64_t mesh_seed = 1;
  double kappa = 1e6;
  double tau_min = 1e-3;
  double tau_max = 1e-1;

  // [history]
  HistoryMode history = HistoryMode::direct;
  double soe_tol = 1e-12;

  // [output]
  std::string out_dir;
  std::vector<double> snapshot_times;

  /// Lines exactly as read, for the metadata file.
  std::map<std::string, std::string> raw;

  void validate() const;
};

inline std::string to_string(InitialKind k) {
  switch (k) {
    case InitialKind::four_drops: return "four_drops";
    case InitialKind::random: return "random";
    case InitialKind::manufactured: return "manufactured";
    case InitialKind::constant: return "constant";
  }
  return "?";
}
inline std::string to_string(SourceKind k) { return k == SourceKind::none ? "none" : "manufactured"; }
inline std::string to_string(Continuation c) {
  switch (c) {
    case Continuation::none: return "none";
    case Continuation::uniform: return "uniform";
    case Continuation::random: return "random";
    case Continuation::adaptive: return "adaptive";
  }
  return "?";
}
inline std::string to_string(HistoryMode h) { return h == HistoryMode::direct ? "direct" : "fast"; }

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline double parse_double(const std::string& key, const std::string& v) {
  double x = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not a number: '" + v + "'");
  return x;
}

inline std::uint64_t parse_uint(const std::string& key, const std::string& v) {
  std::uint64_t x = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc() || p != end) throw ConfigError(key + ": not a nonnegative integer: '" + v + "'");
  return x;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

inline std::vector<double> parse_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(parse_double(key, item));
  }
  return out;
}

template <class E>
E parse_enum(const std::string& key, const std::string& v, std::initializer_list<std::pair<const char*, E>> table) {
  std::string names;
  for (const auto& [name, e] : table) {
    if (v == name) return e;
    names += names.empty() ? name : std::string("|") + name;
  }
  throw ConfigError(key + ": expected one of " + names + ", got '" + v + "'");
}

inline void apply_key(ExperimentConfig& c, const std::string& key, const std::string& v) {
  auto num = [&] { return parse_double(key, v); };
  auto uint = [&] { return parse_uint(key, v); };

  if (key == "model.kind") {
    c.model = parse_enum<ModelKind>(key, v,
                                    {{"tfac", ModelKind::allen_cahn},
                                     {"tfac_conservative", ModelKind::allen_cahn_conservative},
                                     {"tfch", ModelKind::cahn_hilliard}});
  } else if (key == "model.scheme") {
    c.scheme = parse_enum<SchemeKind>(key, v, {{"ieq", SchemeKind::ieq}, {"sav", SchemeKind::sav}});
  } else if (key == "model.alpha") {
    c.params.alpha = num();
  } else if (key == "model.lambda") {
    c.params.lambda = num();
  } else if (key == "model.epsilon") {
    c.params.epsilon = num();
  } else if (key == "model.beta") {
    c.params.beta = num();
  } else if (key == "model.C0") {
    c.params.C0 = num();
  } else if (key == "model.multiplier") {
    c.multiplier = parse_bool(key, v);
  } else if (key == "grid.M") {
    c.M = uint();
  } else if (key == "grid.domain") {
    const auto d = parse_list(key, v);
    if (d.size() != 4) throw ConfigError(key + ": expected x0,x1,y0,y1");
    c.domain = Domain{d[0], d[1], d[2], d[3]};
  } else if (key == "grid.dealias") {
    c.dealias = parse_bool(key, v);
  } else if (key == "initial.kind") {
    c.initial = parse_enum<InitialKind>(key, v,
                                        {{"four_drops", InitialKind::four_drops},
                                         {"random", InitialKind::random},
                                         {"manufactured", InitialKind::manufactured},
                                         {"constant", InitialKind::constant}});
  } else if (key == "initial.amplitude") {
    c.amplitude = num();
  } else if (key == "initial.value") {
    c.value = num();
  } else if (key == "initial.seed") {
    c.initial_seed = uint();
  } else if (key == "source.kind") {
    c.source = parse_enum<SourceKind>(key, v, {{"none", SourceKind::none}, {"manufactured", SourceKind::manufactured}});
  } else if (key == "source.sigma") {
    c.sigma = num();
  } else if (key == "mesh.T") {
    c.T = num();
  } else if (key == "mesh.T0") {
    c.T0 = num();
  } else if (key == "mesh.N0") {
    c.N0 = uint();
  } else if (key == "mesh.gamma") {
    c.gamma = num();
  } else if (key == "mesh.continuation") {
    c.continuation = parse_enum<Continuation>(key, v,
                                              {{"none", Continuation::none},
                                               {"uniform", Continuation::uniform},
                                               {"random", Continuation::random},
                                               {"adaptive", Continuation::adaptive}});
  } else if (key == "mesh.N1") {
    c.N1 = uint();
  } else if (key == "mesh.seed") {
    c.mesh_seed = uint();
  } else if (key == "mesh.kappa") {
    c.kappa = num();
  } else if (key == "mesh.tau_min") {
    c.tau_min = num();
  } else if (key == "mesh.tau_max") {
    c.tau_max = num();
  } else if (key == "history.mode") {
    c.history = parse_enum<HistoryMode>(key, v, {{"direct", HistoryMode::direct}, {"fast", HistoryMode::fast}});
  } else if (key == "history.tol") {
    c.soe_tol = num();
  } else if (key == "output.dir") {
    c.out_dir = v;
  } else if (key == "output.snapshots") {
    c.snapshot_times = parse_list(key, v);
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

}  // namespace detail

inline void ExperimentConfig::validate() const {
  try {
    params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (M < 4 || M % 2 != 0) throw ConfigError("grid.M must be even and >= 4");
  if (!(domain.lx() > 0.0) || !(domain.ly() > 0.0)) throw ConfigError("grid.domain is empty");
  if (!(T > 0.0)) throw ConfigError("mesh.T must be positive");
  if (!(T0 > 0.0) || T0 > T) throw ConfigError("mesh.T0 must lie in (0, T]");
  if (N0 < 1) throw ConfigError("mesh.N0 must be >= 1");
  if (!(gamma >= 1.0)) throw ConfigError("mesh.gamma must be >= 1");
  if ((continuation == Continuation::uniform || continuation == Continuation::random) && N1 < 1 && T > T0)
    throw ConfigError("mesh.N1 must be >= 1");
  if (continuation == Continuation::none && T > T0) throw ConfigError("mesh.continuation is none but T > T0");
  if (continuation == Continuation::adaptive) {
    if (!(kappa >= 0.0)) throw ConfigError("mesh.kappa must be >= 0");
    if (!(tau_min > 0.0) || !(tau_max >= tau_min)) throw ConfigError("need 0 < mesh.tau_min <= mesh.tau_max");
  }
  if (!(amplitude >= 0.0)) throw ConfigError("initial.amplitude must be >= 0");
  if (source == SourceKind::manufactured) {
    if (!(sigma > 0.0)) throw ConfigError("source.sigma must be positive");
    if (model == ModelKind::cahn_hilliard) throw ConfigError("tfch does not take a source term");
  }
  if (!(soe_tol > 0.0)) throw ConfigError("history.tol must be positive");
  for (double t : snapshot_times)
    if (!(t >= 0.0 && t <= T)) throw ConfigError("output.snapshots must lie in [0, T]");
}

/// Sections in brackets, `key = value` lines, `#` or `;` comments.
inline ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "malformed section header");
      section = detail::trim(std::string_view(line).substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    if (section.empty()) throw ConfigError(where + "key outside of a section");
    const std::string key = section + "." + detail::trim(std::string_view(line).substr(0, eq));
    const std::string value = detail::trim(std::string_view(line).substr(eq + 1));
    if (c.raw.count(key)) throw ConfigError(where + "duplicate key '" + key + "'");
    try {
      detail::apply_key(c, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
    c.raw[key] = value;
  }
  c.validate();
  return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return parse_config(in);
}

}  // namespace fracpf
