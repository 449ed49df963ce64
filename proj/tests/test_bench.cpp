#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "cando/bench.hpp"
#include "cando/error.hpp"
#include "cando/solver_config.hpp"

using namespace cando;

namespace {

std::optional<ErrorCode> code_of(const std::string& text) {
  try {
    bench_spec_from_json(text);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream s(text);
  for (std::string line; std::getline(s, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("bench spec parsing: defaults") {
  const auto spec = bench_spec_from_json(R"({"runs": [{"n_sensors": 10}]})", "/tmp/out");
  REQUIRE(spec.runs.size() == 1);
  const auto& r = spec.runs[0];
  CHECK(r.generator.dim == 2);
  CHECK(r.generator.radio_range == 0.5);
  CHECK(r.generator.max_degree == default_max_degree(2));
  CHECK(r.seeds == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  CHECK(r.solver == SolverKind::Cpras);
  CHECK(spec.aggregate_csv == "/tmp/out/bench.csv");
  CHECK(spec.detail_csv == "/tmp/out/bench_detail.csv");

  const auto s3 = bench_spec_from_json(
      R"({"runs": [{"dim": 3, "n_sensors": 8, "max_degree": 0, "repetitions": 2, "seed": 7,
          "solver": "cone", "params": {"eta": 40}}], "aggregate_csv": "/abs/a.csv"})",
      "base");
  CHECK(s3.runs[0].generator.radio_range == 1.0);
  CHECK_FALSE(s3.runs[0].generator.max_degree.has_value());
  CHECK(s3.runs[0].seeds == std::vector<std::uint64_t>{7, 8});
  CHECK(s3.runs[0].solver == SolverKind::Cone);
  CHECK(*cone_params_from_json(s3.runs[0].params).eta == 40.0);
  CHECK(s3.aggregate_csv == "/abs/a.csv");
}

TEST_CASE("bench spec parsing: errors") {
  CHECK(code_of("{") == ErrorCode::Parse);
  CHECK(code_of("[]") == ErrorCode::Parse);
  CHECK(code_of(R"({"runs": []})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"runs": [{"n_sensors": 5}], "extra": 1})") == ErrorCode::Parse);
  CHECK(code_of(R"({"runs": [{"n_sensors": 5, "colour": 1}]})") == ErrorCode::Parse);
  CHECK(code_of(R"({"runs": [{}]})") == ErrorCode::Parse);
  CHECK(code_of(R"({"runs": [{"n_sensors": 5, "seeds": [1, 1]}]})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"runs": [{"n_sensors": 5, "seeds": [1], "repetitions": 1}]})") == ErrorCode::Parse);
  CHECK(code_of(R"({"runs": [{"n_sensors": 5, "repetitions": 0}]})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"runs": [{"n_sensors": 0}]})") == ErrorCode::InvalidArgument);
  CHECK(code_of(R"({"runs": [{"n_sensors": 5, "solver": "simplex"}]})").has_value());
  CHECK(code_of(R"({"runs": [{"n_sensors": 5, "params": 3}]})") == ErrorCode::Parse);
  CHECK(code_of(R"({"runs": [{"n_sensors": 5}], "detail_csv": ""})") == ErrorCode::InvalidArgument);
}

TEST_CASE("solver parameter JSON") {
  const auto p = cpras_params_from_json(R"({"beta": 0.2, "max_outer": 7, "square_fallback": false})");
  CHECK(p.beta == 0.2);
  CHECK(p.max_outer == 7);
  CHECK_FALSE(p.square_fallback);
  const auto q = cpras_params_from_json(cpras_params_to_json(p));
  CHECK(q.beta == 0.2);
  CHECK(q.max_outer == 7);
  CHECK(cpras_params_from_json("").beta == CprasParams{}.beta);
  CHECK_THROWS_AS(cpras_params_from_json(R"({"beta": "big"})"), Error);
  CHECK_THROWS_AS(cpras_params_from_json(R"({"bta": 0.1})"), Error);
  CHECK(parse_solver("cone") == SolverKind::Cone);
  CHECK_THROWS_AS(parse_solver("newton"), Error);
}

TEST_CASE("bench run: one row per configuration and one per repetition") {
  const auto dir = std::filesystem::temp_directory_path() / "cando_test_bench";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string spec_text =
      R"({"runs": [{"n_sensors": 12, "rho": 0.8, "seeds": [1, 2, 3, 4, 5]},
                   {"n_sensors": 6, "rho": 1.5, "seeds": [11, 12]}]})";
  const auto path = dir / "spec.json";
  std::ofstream(path) << spec_text;
  const auto spec = load_bench_spec(path.string());
  CHECK(spec.aggregate_csv == (dir / "bench.csv").string());
  const auto result = run_bench(spec);
  REQUIRE(result.detail.size() == 7);
  REQUIRE(result.aggregate.size() == 2);
  CHECK(result.all_converged());
  // ordered by n, not spec order
  CHECK(result.aggregate[0].n == 12);
  CHECK(result.aggregate[1].n == 24);
  CHECK(result.aggregate[1].repetitions == 5);

  double iters = 0.0, m = 0.0, rmsd = 0.0;
  for (const auto& d : result.detail) {
    if (d.run != 0) continue;
    iters += d.iterations;
    m += static_cast<double>(d.m);
    rmsd += d.rmsd;
  }
  CHECK(result.aggregate[1].mean_iter == doctest::Approx(iters / 5).epsilon(1e-12));
  CHECK(result.aggregate[1].mean_m == doctest::Approx(m / 5).epsilon(1e-12));
  CHECK(result.aggregate[1].mean_rmsd == doctest::Approx(rmsd / 5).epsilon(1e-12));

  write_bench_csvs(spec, result);
  const auto agg = lines_of(read_file(dir / "bench.csv"));
  const auto det = lines_of(read_file(dir / "bench_detail.csv"));
  REQUIRE(agg.size() == 3);
  CHECK(agg[0] == "dim,n,mean_m,mean_iter,mean_rmsd,mean_time_s");
  CHECK(agg[1].rfind("2,12,", 0) == 0);
  REQUIRE(det.size() == 8);
  CHECK(det[0] == "run,dim,n,m,seed,solver,status,iterations,rmsd,time_s,final_gamma_sq");

  // same spec, same numbers (timings aside)
  const auto again = run_bench(spec);
  for (std::size_t i = 0; i < again.detail.size(); ++i) {
    CHECK(again.detail[i].iterations == result.detail[i].iterations);
    CHECK(again.detail[i].rmsd == result.detail[i].rmsd);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("bench output to an unwritable path fails with an IO error") {
  auto spec = bench_spec_from_json(R"({"runs": [{"n_sensors": 3, "rho": 1.5, "seeds": [1]}],
      "aggregate_csv": "/nonexistent_dir/x.csv", "detail_csv": "/nonexistent_dir/y.csv"})");
  const auto result = run_bench(spec);
  try {
    write_bench_csvs(spec, result);
    FAIL("expected Io");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}
