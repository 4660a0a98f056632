// fracpf: run time-fractional phase-field experiments from a config file.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fracpf/fracpf.hpp"

namespace {

using namespace fracpf;

// One line on stderr, key=value pairs, message last and quoted.
int fail(const char* code, const std::string& message) {
  std::string m;
  for (char ch : message) {
    if (ch == '"' || ch == '\\') m += '\\';
    m += ch == '\n' ? ' ' : ch;
  }
  std::fprintf(stderr, "error code=%s message=\"%s\"\n", code, m.c_str());
  return 1;
}

template <class T>
std::vector<T> split_list(const std::string& s) {
  std::vector<T> out;
  for (double v : detail::parse_list("list", s)) {
    if constexpr (std::is_integral_v<T>) {
      if (v < 0 || v != static_cast<double>(static_cast<T>(v))) throw ConfigError("expected integers in '" + s + "'");
    }
    out.push_back(static_cast<T>(v));
  }
  return out;
}

int cmd_run(const std::string& config_path, const std::string& out, bool dump_mesh) {
  ExperimentConfig c = load_config(config_path);
  if (!out.empty()) c.out_dir = out;
  const RunResult r = run(c);
  if (dump_mesh) write_mesh_csv(std::cout, r.mesh);
  std::fprintf(stderr, "steps=%zu t=%.17g E=%.17g volume=%.17g wall=%.3fs\n", r.steps(), r.mesh.final_time(),
               r.log.back().E_original, r.log.back().volume, r.wall_seconds);
  return 0;
}

int cmd_converge(const std::string& config_path, const std::string& gammas, const std::string& levels,
                 const std::string& out) {
  ExperimentConfig c = load_config(config_path);
  const ConvergenceTable t = convergence_study(c, split_list<double>(gammas), split_list<std::size_t>(levels));
  write_convergence_csv(std::cout, t);
  for (const auto& [g, order] : t.fitted) std::fprintf(stderr, "gamma=%g fitted_order=%.4f\n", g, order);
  const std::string dir = out.empty() ? c.out_dir : out;
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    std::ofstream f(std::filesystem::path(dir) / "convergence.csv");
    write_convergence_csv(f, t);
  }
  return 0;
}

int cmd_mesh_dump(const std::string& config_path) {
  const ExperimentConfig c = load_config(config_path);
  write_mesh_csv(std::cout, planned_mesh(c));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-fractional phase-field solver"};
  app.require_subcommand(1);

  std::string config, out, gammas = "2,5,6", levels = "10,20,40,80";
  bool dump_mesh = false;

  auto* run = app.add_subcommand("run", "Run one experiment");
  run->add_option("--config", config, "Config file")->required();
  run->add_option("--out", out, "Output directory (overrides output.dir)");
  run->add_flag("--dump-mesh", dump_mesh, "Print the final mesh as CSV on stdout");

  auto* conv = app.add_subcommand("converge", "Manufactured-solution convergence sweep");
  conv->add_option("--config", config, "Config file")->required();
  conv->add_option("--gammas", gammas, "Comma-separated grading exponents");
  conv->add_option("--levels", levels, "Comma-separated step counts N");
  conv->add_option("--out", out, "Directory for convergence.csv");

  auto* mesh = app.add_subcommand("mesh-dump", "Print the planned time mesh as CSV");
  mesh->add_option("--config", config, "Config file")->required();

  app.add_subcommand("version", "Print the version");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("usage", e.what());
  }

  try {
    if (*run) return cmd_run(config, out, dump_mesh);
    if (*conv) return cmd_converge(config, gammas, levels, out);
    if (*mesh) return cmd_mesh_dump(config);
    std::printf("fracpf %s\n", version());
    return 0;
  } catch (const ConfigError& e) {
    return fail("config", e.what());
  } catch (const StepFailure& e) {
    return fail("step_failure", e.what());
  } catch (const IoError& e) {
    return fail("io", e.what());
  } catch (const std::exception& e) {
    return fail("internal", e.what());
  }
}
