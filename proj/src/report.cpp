#include "cando/report.hpp"

#include <cstdio>
#include <fstream>

#include <json.hpp>

#include "cando/error.hpp"

namespace cando {

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::LineSearchFailure: return "LineSearchFailure";
    case SolveStatus::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "Unknown";
}

namespace {

nlohmann::json vector_json(const Vector& v) {
  nlohmann::json arr = nlohmann::json::array();
  for (Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

}  // namespace

std::string report_to_json(const SolveReport& r) {
  nlohmann::json doc;
  doc["solver"] = r.solver;
  doc["status"] = to_string(r.status);
  doc["message"] = r.message;
  doc["iterations"] = r.iterations;
  doc["rmsd"] = r.rmsd ? nlohmann::json(*r.rmsd) : nlohmann::json(nullptr);
  doc["wall_time_s"] = r.wall_time_s;
  doc["initial_gamma_sq"] = r.initial_gamma_sq;
  doc["final_gamma_sq"] = r.final_gamma_sq;
  doc["max_residual_norm"] = r.max_residual_norm;
  doc["max_iterate_norm"] = r.max_iterate_norm;
  doc["descent_violations"] = r.descent_violations;
  doc["increase_violations"] = r.increase_violations;
  doc["fallback_directions"] = r.fallback_directions;
  doc["x"] = vector_json(r.x);
  doc["sigma"] = vector_json(r.sigma);
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& t : r.trace) {
    trace.push_back({{"iteration", t.iteration},
                     {"gamma_sq", t.gamma_sq},
                     {"psi", t.psi},
                     {"alpha", t.alpha},
                     {"delta", t.delta},
                     {"lsqr_iters", t.lsqr_iters},
                     {"elapsed_s", t.elapsed_s},
                     {"grad_dot_d", t.grad_dot_d},
                     {"backtracks", t.backtracks},
                     {"fallback", t.fallback}});
  }
  doc["trace"] = std::move(trace);
  return doc.dump(1) + "\n";
}

void write_report_json(const std::string& path, const SolveReport& report) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << report_to_json(report);
}

void write_trace_csv(const std::string& path, const SolveReport& report) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << "iteration,gamma_sq,psi,alpha,delta,lsqr_iters,elapsed_s\n";
  char line[256];
  for (const auto& t : report.trace) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%d,%.6f\n", t.iteration,
                  t.gamma_sq, t.psi, t.alpha, t.delta, t.lsqr_iters, t.elapsed_s);
    out << line;
  }
}

}  // namespace cando
