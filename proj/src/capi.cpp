#include "cando/cando.h"

#include <cstring>
#include <exception>
#include <new>
#include <string>

#include "cando/bench.hpp"
#include "cando/error.hpp"
#include "cando/report.hpp"
#include "cando/snl.hpp"
#include "cando/solver_config.hpp"

struct cando_instance {
  cando::SnlInstance inst;
};

struct cando_report {
  cando::SolveReport report;
  int dim = 0;
};

namespace {

thread_local std::string g_last_error;

int code_of(cando::ErrorCode code) {
  using cando::ErrorCode;
  switch (code) {
    case ErrorCode::InvalidArgument: return CANDO_ERR_INVALID_ARGUMENT;
    case ErrorCode::DimensionMismatch: return CANDO_ERR_DIMENSION_MISMATCH;
    case ErrorCode::NonFinite: return CANDO_ERR_NON_FINITE;
    case ErrorCode::Asymmetric: return CANDO_ERR_ASYMMETRIC;
    case ErrorCode::SingularG: return CANDO_ERR_SINGULAR_G;
    case ErrorCode::BoundaryViolation: return CANDO_ERR_BOUNDARY;
    case ErrorCode::MissingOracle: return CANDO_ERR_MISSING_ORACLE;
    case ErrorCode::MissingTruth: return CANDO_ERR_MISSING_TRUTH;
    case ErrorCode::SizeGuard: return CANDO_ERR_SIZE_GUARD;
    case ErrorCode::Io: return CANDO_ERR_IO;
    case ErrorCode::Parse: return CANDO_ERR_PARSE;
    case ErrorCode::VersionMismatch: return CANDO_ERR_VERSION;
    case ErrorCode::LineSearchFailure: return CANDO_ERR_LINE_SEARCH;
    case ErrorCode::NumericalBreakdown: return CANDO_ERR_NUMERICAL;
  }
  return CANDO_ERR_INTERNAL;
}

int set_error(int code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs body, translating exceptions into return codes.
template <typename F>
int guarded(F&& body) {
  try {
    g_last_error.clear();
    body();
    return CANDO_OK;
  } catch (const cando::Error& e) {
    return set_error(code_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return set_error(CANDO_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return set_error(CANDO_ERR_INTERNAL, e.what());
  }
}

#define CANDO_REQUIRE_PTR(p) \
  if (!(p)) return set_error(CANDO_ERR_NULL_POINTER, #p " is null")

int copy_vector(const cando::Vector& v, double* buf, size_t cap, size_t* len) {
  const size_t n = static_cast<size_t>(v.size());
  if (len) *len = n;
  if (!buf) return cap == 0 ? CANDO_OK : set_error(CANDO_ERR_NULL_POINTER, "buf is null");
  if (cap < n) return set_error(CANDO_ERR_BUFFER_TOO_SMALL, "buffer holds fewer entries than needed");
  if (n > 0) std::memcpy(buf, v.data(), n * sizeof(double));
  return CANDO_OK;
}

}  // namespace

extern "C" {

const char* cando_version(void) { return "1.0.0"; }

const char* cando_last_error(void) { return g_last_error.c_str(); }

const char* cando_error_name(int code) {
  switch (code) {
    case CANDO_OK: return "OK";
    case CANDO_ERR_INVALID_ARGUMENT: return "InvalidArgument";
    case CANDO_ERR_DIMENSION_MISMATCH: return "DimensionMismatch";
    case CANDO_ERR_NON_FINITE: return "NonFinite";
    case CANDO_ERR_ASYMMETRIC: return "Asymmetric";
    case CANDO_ERR_SINGULAR_G: return "SingularG";
    case CANDO_ERR_BOUNDARY: return "BoundaryViolation";
    case CANDO_ERR_MISSING_ORACLE: return "MissingOracle";
    case CANDO_ERR_MISSING_TRUTH: return "MissingTruth";
    case CANDO_ERR_SIZE_GUARD: return "SizeGuard";
    case CANDO_ERR_IO: return "Io";
    case CANDO_ERR_PARSE: return "Parse";
    case CANDO_ERR_VERSION: return "VersionMismatch";
    case CANDO_ERR_LINE_SEARCH: return "LineSearchFailure";
    case CANDO_ERR_NUMERICAL: return "NumericalBreakdown";
    case CANDO_ERR_NULL_POINTER: return "NullPointer";
    case CANDO_ERR_BUFFER_TOO_SMALL: return "BufferTooSmall";
    default: return "Internal";
  }
}

void cando_generator_config_default(cando_generator_config* cfg) {
  if (!cfg) return;
  cfg->dim = 2;
  cfg->n_sensors = 100;
  cfg->rho = 0.5;
  cfg->seed = 1;
  cfg->noise = 0.0;
  cfg->max_degree = -1;
}

int cando_generate(const cando_generator_config* cfg, cando_instance** out) {
  CANDO_REQUIRE_PTR(cfg);
  CANDO_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] {
    cando::GeneratorConfig g;
    g.dim = cfg->dim;
    g.n_sensors = cfg->n_sensors;
    g.radio_range = cfg->rho;
    g.seed = cfg->seed;
    g.noise_factor = cfg->noise;
    if (cfg->max_degree < 0) g.max_degree = cando::default_max_degree(cfg->dim);
    else if (cfg->max_degree > 0) g.max_degree = cfg->max_degree;
    *out = new cando_instance{cando::generate_instance(g)};
  });
}

int cando_instance_load(const char* path, cando_instance** out) {
  CANDO_REQUIRE_PTR(path);
  CANDO_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] { *out = new cando_instance{cando::load_instance(path)}; });
}

int cando_instance_from_json(const char* text, cando_instance** out) {
  CANDO_REQUIRE_PTR(text);
  CANDO_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] { *out = new cando_instance{cando::instance_from_json(text)}; });
}

int cando_instance_save(const cando_instance* inst, const char* path) {
  CANDO_REQUIRE_PTR(inst);
  CANDO_REQUIRE_PTR(path);
  return guarded([&] { cando::save_instance(inst->inst, path); });
}

void cando_instance_free(cando_instance* inst) { delete inst; }

int cando_instance_dim(const cando_instance* inst, int* out) {
  CANDO_REQUIRE_PTR(inst);
  CANDO_REQUIRE_PTR(out);
  *out = inst->inst.dim;
  return CANDO_OK;
}

int cando_instance_n_sensors(const cando_instance* inst, int* out) {
  CANDO_REQUIRE_PTR(inst);
  CANDO_REQUIRE_PTR(out);
  *out = inst->inst.n_sensors;
  return CANDO_OK;
}

int cando_instance_sizes(const cando_instance* inst, size_t* n, size_t* m) {
  CANDO_REQUIRE_PTR(inst);
  if (n) *n = static_cast<size_t>(inst->inst.n());
  if (m) *m = static_cast<size_t>(inst->inst.m());
  return CANDO_OK;
}

int cando_instance_has_truth(const cando_instance* inst, int* out) {
  CANDO_REQUIRE_PTR(inst);
  CANDO_REQUIRE_PTR(out);
  *out = inst->inst.truth ? 1 : 0;
  return CANDO_OK;
}

int cando_instance_primal(const cando_instance* inst, const double* x, size_t len, double* out) {
  CANDO_REQUIRE_PTR(inst);
  CANDO_REQUIRE_PTR(x);
  CANDO_REQUIRE_PTR(out);
  return guarded([&] {
    const cando::Vector v = Eigen::Map<const cando::Vector>(x, static_cast<cando::Index>(len));
    *out = cando::snl_primal(inst->inst, v);
  });
}

int cando_solve(const cando_instance* inst, const char* solver, const char* params_json,
                cando_report** out) {
  CANDO_REQUIRE_PTR(inst);
  CANDO_REQUIRE_PTR(solver);
  CANDO_REQUIRE_PTR(out);
  *out = nullptr;
  return guarded([&] {
    const auto kind = cando::parse_solver(solver);
    auto* r = new cando_report;
    try {
      r->report = cando::run_solver(inst->inst, kind, params_json ? params_json : "");
    } catch (...) {
      delete r;
      throw;
    }
    r->dim = inst->inst.dim;
    *out = r;
  });
}

void cando_report_free(cando_report* report) { delete report; }

int cando_report_status(const cando_report* report, int* out) {
  CANDO_REQUIRE_PTR(report);
  CANDO_REQUIRE_PTR(out);
  *out = static_cast<int>(report->report.status);
  return CANDO_OK;
}

const char* cando_report_status_name(const cando_report* report) {
  return report ? cando::to_string(report->report.status) : "";
}

const char* cando_report_message(const cando_report* report) {
  return report ? report->report.message.c_str() : "";
}

int cando_report_iterations(const cando_report* report, int* out) {
  CANDO_REQUIRE_PTR(report);
  CANDO_REQUIRE_PTR(out);
  *out = report->report.iterations;
  return CANDO_OK;
}

int cando_report_rmsd(const cando_report* report, double* out) {
  CANDO_REQUIRE_PTR(report);
  CANDO_REQUIRE_PTR(out);
  if (!report->report.rmsd) return set_error(CANDO_ERR_MISSING_TRUTH, "instance had no ground truth");
  *out = *report->report.rmsd;
  return CANDO_OK;
}

int cando_report_wall_time(const cando_report* report, double* out) {
  CANDO_REQUIRE_PTR(report);
  CANDO_REQUIRE_PTR(out);
  *out = report->report.wall_time_s;
  return CANDO_OK;
}

int cando_report_final_gamma_sq(const cando_report* report, double* out) {
  CANDO_REQUIRE_PTR(report);
  CANDO_REQUIRE_PTR(out);
  *out = report->report.final_gamma_sq;
  return CANDO_OK;
}

int cando_report_x(const cando_report* report, double* buf, size_t cap, size_t* len) {
  CANDO_REQUIRE_PTR(report);
  return copy_vector(report->report.x, buf, cap, len);
}

int cando_report_sigma(const cando_report* report, double* buf, size_t cap, size_t* len) {
  CANDO_REQUIRE_PTR(report);
  return copy_vector(report->report.sigma, buf, cap, len);
}

int cando_report_write_json(const cando_report* report, const char* path) {
  CANDO_REQUIRE_PTR(report);
  CANDO_REQUIRE_PTR(path);
  return guarded([&] { cando::write_report_json(path, report->report); });
}

int cando_report_write_trace(const cando_report* report, const char* path) {
  CANDO_REQUIRE_PTR(report);
  CANDO_REQUIRE_PTR(path);
  return guarded([&] { cando::write_trace_csv(path, report->report); });
}

int cando_report_write_positions(const cando_report* report, const char* path) {
  CANDO_REQUIRE_PTR(report);
  CANDO_REQUIRE_PTR(path);
  return guarded([&] { cando::write_positions_csv(path, report->report.x, report->dim); });
}

int cando_bench_run(const char* spec_path, int* all_converged) {
  CANDO_REQUIRE_PTR(spec_path);
  return guarded([&] {
    const cando::BenchSpec spec = cando::load_bench_spec(spec_path);
    const cando::BenchResult result = cando::run_bench(spec);
    cando::write_bench_csvs(spec, result);
    if (all_converged) *all_converged = result.all_converged() ? 1 : 0;
  });
}

}  // extern "C"
