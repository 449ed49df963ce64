#include "cando/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "cando/error.hpp"
#include "cando/log.hpp"

namespace cando {

using nlohmann::json;

void BenchSpec::validate() const {
  require(!runs.empty(), ErrorCode::InvalidArgument, "bench: spec has no runs");
  require(!aggregate_csv.empty() && !detail_csv.empty(), ErrorCode::InvalidArgument,
          "bench: both output paths are required");
  for (const auto& r : runs) {
    r.generator.validate();
    require(!r.seeds.empty(), ErrorCode::InvalidArgument, "bench: repetitions must be >= 1");
    const std::set<std::uint64_t> unique(r.seeds.begin(), r.seeds.end());
    require(unique.size() == r.seeds.size(), ErrorCode::InvalidArgument,
            "bench: seeds within a run must be distinct");
  }
}

namespace {

std::string resolve(const std::string& path, const std::string& base) {
  if (base.empty() || path.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).string();
}

const std::set<std::string> kRunKeys{"dim",    "n_sensors", "rho",   "noise",      "max_degree",
                                     "solver", "params",    "seeds", "repetitions", "seed"};

BenchRun run_from_json(const json& j) {
  require(j.is_object(), ErrorCode::Parse, "bench spec: each run must be an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    require(kRunKeys.count(it.key()) > 0, ErrorCode::Parse,
            "bench spec: unknown run key '" + it.key() + "'");
  }
  BenchRun r;
  r.generator.dim = j.value("dim", 2);
  r.generator.n_sensors = j.at("n_sensors").get<int>();
  r.generator.radio_range = j.value("rho", r.generator.dim == 3 ? 1.0 : 0.5);
  r.generator.noise_factor = j.value("noise", 0.0);
  // Absent selects the protocol default; 0 or null disables the cap.
  if (!j.contains("max_degree")) {
    r.generator.max_degree = default_max_degree(r.generator.dim);
  } else if (!j.at("max_degree").is_null() && j.at("max_degree").get<int>() > 0) {
    r.generator.max_degree = j.at("max_degree").get<int>();
  }
  r.solver = parse_solver(j.value("solver", std::string("cpras")));
  if (j.contains("params")) {
    require(j.at("params").is_object(), ErrorCode::Parse, "bench spec: params must be an object");
    r.params = j.at("params").dump();
  }
  if (j.contains("seeds")) {
    require(!j.contains("repetitions"), ErrorCode::Parse,
            "bench spec: give either seeds or repetitions, not both");
    r.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } else {
    const int reps = j.value("repetitions", 5);
    require(reps >= 1, ErrorCode::InvalidArgument, "bench: repetitions must be >= 1");
    const std::uint64_t first = j.value("seed", std::uint64_t{1});
    for (int s = 0; s < reps; ++s) r.seeds.push_back(first + static_cast<std::uint64_t>(s));
  }
  return r;
}

}  // namespace

BenchSpec bench_spec_from_json(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("bench spec: ") + e.what());
  }
  BenchSpec spec;
  try {
    require(doc.is_object(), ErrorCode::Parse, "bench spec: expected a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      require(it.key() == "runs" || it.key() == "aggregate_csv" || it.key() == "detail_csv",
              ErrorCode::Parse, "bench spec: unknown key '" + it.key() + "'");
    }
    for (const auto& r : doc.at("runs")) spec.runs.push_back(run_from_json(r));
    spec.aggregate_csv = resolve(doc.value("aggregate_csv", std::string("bench.csv")), base_dir);
    spec.detail_csv = resolve(doc.value("detail_csv", std::string("bench_detail.csv")), base_dir);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("bench spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

BenchSpec load_bench_spec(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return bench_spec_from_json(buf.str(), std::filesystem::path(path).parent_path().string());
}

bool BenchResult::all_converged() const {
  return std::all_of(detail.begin(), detail.end(),
                     [](const BenchDetailRow& r) { return r.status == "Converged"; });
}

BenchResult run_bench(const BenchSpec& spec) {
  spec.validate();
  BenchResult result;
  for (std::size_t ri = 0; ri < spec.runs.size(); ++ri) {
    const BenchRun& run = spec.runs[ri];
    BenchAggregateRow agg;
    agg.run = static_cast<int>(ri);
    agg.dim = run.generator.dim;
    for (const std::uint64_t seed : run.seeds) {
      GeneratorConfig cfg = run.generator;
      cfg.seed = seed;
      const SnlInstance inst = generate_instance(cfg);
      const SolveReport rep = run_solver(inst, run.solver, run.params);
      BenchDetailRow row;
      row.run = agg.run;
      row.dim = inst.dim;
      row.n = inst.n();
      row.m = inst.m();
      row.seed = seed;
      row.solver = rep.solver;
      row.status = to_string(rep.status);
      row.iterations = rep.iterations;
      row.rmsd = rep.rmsd.value_or(0.0);
      row.time_s = rep.wall_time_s;
      row.final_gamma_sq = rep.final_gamma_sq;
      log::info("bench run ", ri, " seed ", seed, ": ", row.status, " iters=", row.iterations,
                " rmsd=", row.rmsd);
      agg.n = row.n;
      agg.mean_m += static_cast<double>(row.m);
      agg.mean_iter += row.iterations;
      agg.mean_rmsd += row.rmsd;
      agg.mean_time_s += row.time_s;
      agg.converged += rep.status == SolveStatus::Converged ? 1 : 0;
      ++agg.repetitions;
      result.detail.push_back(row);
    }
    const double k = static_cast<double>(agg.repetitions);
    agg.mean_m /= k;
    agg.mean_iter /= k;
    agg.mean_rmsd /= k;
    agg.mean_time_s /= k;
    result.aggregate.push_back(agg);
  }
  std::stable_sort(result.aggregate.begin(), result.aggregate.end(),
                   [](const BenchAggregateRow& a, const BenchAggregateRow& b) {
                     return a.dim != b.dim ? a.dim < b.dim : a.n < b.n;
                   });
  return result;
}

std::string aggregate_csv(const BenchResult& result) {
  std::string out = "dim,n,mean_m,mean_iter,mean_rmsd,mean_time_s\n";
  char line[256];
  for (const auto& a : result.aggregate) {
    std::snprintf(line, sizeof line, "%d,%ld,%.1f,%.2f,%.6e,%.3f\n", a.dim, static_cast<long>(a.n),
                  a.mean_m, a.mean_iter, a.mean_rmsd, a.mean_time_s);
    out += line;
  }
  return out;
}

std::string detail_csv(const BenchResult& result) {
  std::string out = "run,dim,n,m,seed,solver,status,iterations,rmsd,time_s,final_gamma_sq\n";
  char line[512];
  for (const auto& d : result.detail) {
    std::snprintf(line, sizeof line, "%d,%d,%ld,%ld,%llu,%s,%s,%d,%.6e,%.3f,%.6e\n", d.run, d.dim,
                  static_cast<long>(d.n), static_cast<long>(d.m),
                  static_cast<unsigned long long>(d.seed), d.solver.c_str(), d.status.c_str(),
                  d.iterations, d.rmsd, d.time_s, d.final_gamma_sq);
    out += line;
  }
  return out;
}

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << text;
}

}  // namespace

void write_bench_csvs(const BenchSpec& spec, const BenchResult& result) {
  write_text(spec.aggregate_csv, aggregate_csv(result));
  write_text(spec.detail_csv, detail_csv(result));
}

}  // namespace cando
