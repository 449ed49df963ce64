#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cando/cando.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitNotConverged = 1;
constexpr int kExitUsage = 2;

int report_error(const char* what, int code) {
  std::fprintf(stderr, "cando: %s: %s (%s)\n", what, cando_last_error(), cando_error_name(code));
  return kExitUsage;
}

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path);
  if (!in) return false;
  std::stringstream buf;
  buf << in.rdbuf();
  out = buf.str();
  return true;
}

struct GenerateArgs {
  int dim = 2;
  int n_sensors = 0;
  double rho = 0.0;
  std::uint64_t seed = 1;
  double noise = 0.0;
  int max_degree = -1;
  std::string out;
};

int cmd_generate(const GenerateArgs& a) {
  cando_generator_config cfg;
  cando_generator_config_default(&cfg);
  cfg.dim = a.dim;
  cfg.n_sensors = a.n_sensors;
  cfg.rho = a.rho > 0.0 ? a.rho : (a.dim == 3 ? 1.0 : 0.5);
  cfg.seed = a.seed;
  cfg.noise = a.noise;
  cfg.max_degree = a.max_degree;

  cando_instance* inst = nullptr;
  int rc = cando_generate(&cfg, &inst);
  if (rc != CANDO_OK) return report_error("generate", rc);
  rc = cando_instance_save(inst, a.out.c_str());
  if (rc != CANDO_OK) {
    cando_instance_free(inst);
    return report_error("save", rc);
  }
  size_t n = 0, m = 0;
  cando_instance_sizes(inst, &n, &m);
  std::printf("wrote %s: dim=%d N=%d n=%zu m=%zu\n", a.out.c_str(), cfg.dim, cfg.n_sensors, n, m);
  cando_instance_free(inst);
  return kExitOk;
}

struct SolveArgs {
  std::string instance;
  std::string solver = "cpras";
  std::string params;
  std::string out;
  std::string trace;
  std::string positions;
};

int cmd_solve(const SolveArgs& a) {
  std::string params;
  // Inline JSON object, otherwise a path to a JSON file.
  if (a.params.find_first_not_of(" \t\n") != std::string::npos &&
      a.params[a.params.find_first_not_of(" \t\n")] == '{') {
    params = a.params;
  } else if (!a.params.empty() && !read_file(a.params, params)) {
    std::fprintf(stderr, "cando: cannot read params file '%s'\n", a.params.c_str());
    return kExitUsage;
  }
  cando_instance* inst = nullptr;
  int rc = cando_instance_load(a.instance.c_str(), &inst);
  if (rc != CANDO_OK) return report_error("load", rc);

  cando_report* rep = nullptr;
  rc = cando_solve(inst, a.solver.c_str(), params.c_str(), &rep);
  size_t n = 0, m = 0;
  cando_instance_sizes(inst, &n, &m);
  cando_instance_free(inst);
  if (rc != CANDO_OK) return report_error("solve", rc);

  int exit_code = kExitOk;
  auto write = [&](const std::string& path, int (*fn)(const cando_report*, const char*),
                   const char* what) {
    if (path.empty() || exit_code == kExitUsage) return;
    const int wrc = fn(rep, path.c_str());
    if (wrc != CANDO_OK) exit_code = report_error(what, wrc);
  };
  write(a.out, cando_report_write_json, "write report");
  write(a.trace, cando_report_write_trace, "write trace");
  write(a.positions, cando_report_write_positions, "write positions");

  int status = 0, iters = 0;
  double rmsd = 0.0, time_s = 0.0, gamma_sq = 0.0;
  cando_report_status(rep, &status);
  cando_report_iterations(rep, &iters);
  cando_report_wall_time(rep, &time_s);
  cando_report_final_gamma_sq(rep, &gamma_sq);
  std::printf("solver=%s n=%zu m=%zu status=%s iterations=%d gamma_sq=%.3e time_s=%.3f",
              a.solver.c_str(), n, m, cando_report_status_name(rep), iters, gamma_sq, time_s);
  if (cando_report_rmsd(rep, &rmsd) == CANDO_OK) std::printf(" rmsd=%.6e", rmsd);
  std::printf("\n");
  if (status != CANDO_CONVERGED) {
    std::fprintf(stderr, "cando: solver stopped: %s\n", cando_report_message(rep));
    if (exit_code == kExitOk) exit_code = kExitNotConverged;
  }
  cando_report_free(rep);
  return exit_code;
}

int cmd_bench(const std::string& spec) {
  int all = 0;
  const int rc = cando_bench_run(spec.c_str(), &all);
  if (rc != CANDO_OK) return report_error("bench", rc);
  std::printf("bench %s: %s\n", spec.c_str(), all ? "all runs converged" : "some runs did not converge");
  return all ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor network localization by canonical duality"};
  app.require_subcommand(1);
  app.set_version_flag("--version", cando_version());

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a random instance");
  g->add_option("--dim", gen.dim, "Dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  g->add_option("--n-sensors", gen.n_sensors, "Number of sensors")->required();
  g->add_option("--rho", gen.rho, "Radio range (default 0.5 in 2D, 1.0 in 3D)");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--noise", gen.noise, "Multiplicative noise factor alpha");
  g->add_option("--max-degree", gen.max_degree,
                "Sampled neighbors per sensor (0 keeps all; default 17 in 2D, 23 in 3D)");
  g->add_option("--out", gen.out, "Instance file to write")->required();

  SolveArgs sol;
  auto* s = app.add_subcommand("solve", "Solve an instance file");
  s->add_option("instance", sol.instance, "Instance file")->required();
  s->add_option("--solver", sol.solver, "cpras or cone")->check(CLI::IsMember({"cpras", "cone"}));
  s->add_option("--params", sol.params, "Solver parameters: a JSON object or a JSON file");
  s->add_option("--out", sol.out, "Report file (JSON)");
  s->add_option("--trace", sol.trace, "Per-iteration trace (CSV)");
  s->add_option("--positions", sol.positions, "Estimated positions (CSV)");

  std::string bench_spec;
  auto* b = app.add_subcommand("bench", "Run a benchmark spec");
  b->add_option("--bench", bench_spec, "Bench spec file (JSON)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (g->parsed()) return cmd_generate(gen);
  if (s->parsed()) return cmd_solve(sol);
  return cmd_bench(bench_spec);
}
