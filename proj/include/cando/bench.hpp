#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cando/snl.hpp"
#include "cando/solver_config.hpp"

namespace cando {

struct BenchRun {
  GeneratorConfig generator;  // seed is replaced per repetition
  SolverKind solver = SolverKind::Cpras;
  // Solver parameters as a JSON object text (may be empty).
  std::string params;
  std::vector<std::uint64_t> seeds;
};

struct BenchSpec {
  std::vector<BenchRun> runs;
  std::string aggregate_csv;
  std::string detail_csv;

  void validate() const;
};

// {"aggregate_csv": ..., "detail_csv": ..., "runs": [{"dim", "n_sensors", "rho",
//  "noise", "max_degree", "solver", "params", "seeds" | "repetitions" + "seed"}]}
// Relative output paths are resolved against base_dir when it is non-empty.
BenchSpec bench_spec_from_json(const std::string& text, const std::string& base_dir = "");
BenchSpec load_bench_spec(const std::string& path);

struct BenchDetailRow {
  int run = 0;
  int dim = 0;
  Index n = 0;
  Index m = 0;
  std::uint64_t seed = 0;
  std::string solver;
  std::string status;
  int iterations = 0;
  double rmsd = 0.0;
  double time_s = 0.0;
  double final_gamma_sq = 0.0;
};

struct BenchAggregateRow {
  int run = 0;
  int dim = 0;
  Index n = 0;
  double mean_m = 0.0;
  double mean_iter = 0.0;
  double mean_rmsd = 0.0;
  double mean_time_s = 0.0;
  int converged = 0;
  int repetitions = 0;
};

struct BenchResult {
  std::vector<BenchDetailRow> detail;
  // Ordered by (dim, n), ties in spec order.
  std::vector<BenchAggregateRow> aggregate;

  bool all_converged() const;
};

BenchResult run_bench(const BenchSpec& spec);

// dim,n,mean_m,mean_iter,mean_rmsd,mean_time_s
std::string aggregate_csv(const BenchResult& result);
// run,dim,n,m,seed,solver,status,iterations,rmsd,time_s,final_gamma_sq
std::string detail_csv(const BenchResult& result);
void write_bench_csvs(const BenchSpec& spec, const BenchResult& result);

}  // namespace cando
