#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cando/numerics.hpp"

namespace cando {

enum class SolveStatus { Converged, MaxIterations, LineSearchFailure, NumericalBreakdown };

const char* to_string(SolveStatus status);

struct IterationRecord {
  int iteration = 0;
  double gamma_sq = 0.0;
  double psi = 0.0;
  // Accepted step; 0 on the terminating record.
  double alpha = 0.0;
  double delta = 0.0;
  int lsqr_iters = 0;
  double elapsed_s = 0.0;
  double grad_dot_d = 0.0;
  int backtracks = 0;
  // Direction came from the square fallback system.
  bool fallback = false;
};

struct SolveReport {
  std::string solver;
  SolveStatus status = SolveStatus::MaxIterations;
  std::string message;
  int iterations = 0;
  std::vector<IterationRecord> trace;
  Vector x;
  Vector sigma;
  std::optional<double> rmsd;
  double wall_time_s = 0.0;
  double initial_gamma_sq = 0.0;
  double final_gamma_sq = 0.0;
  // Running maxima of ||H(z^k)|| and ||z^k|| over accepted iterates.
  double max_residual_norm = 0.0;
  double max_iterate_norm = 0.0;
  // Iterations where grad psi . d >= 0 or psi failed to decrease.
  int descent_violations = 0;
  int increase_violations = 0;
  int fallback_directions = 0;
};

// Machine-readable report. Positions and dual variables are included.
std::string report_to_json(const SolveReport& report);
void write_report_json(const std::string& path, const SolveReport& report);

// iteration,gamma_sq,psi,alpha,delta,lsqr_iters,elapsed_s
void write_trace_csv(const std::string& path, const SolveReport& report);

}  // namespace cando
