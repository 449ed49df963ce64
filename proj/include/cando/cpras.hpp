#pragma once

#include <optional>
#include <string>

#include "cando/numerics.hpp"
#include "cando/report.hpp"
#include "cando/snl.hpp"

namespace cando {

// Primal-dual iterate of the simplified sensor solver.
struct CprasState {
  Vector x;
  Vector sigma;
  Vector lambda;
  Vector w;
  double delta = 0.0;
};

// Which sign the relaxation enters the slack block with.
//   Slack:   b = w - sigma - delta   (w is the slack of sigma + delta >= 0)
//   Literal: b = w - sigma + delta
enum class SlackSign { Slack, Literal };

// Sign of the multiplier in the dual stationarity block.
//   Lagrangian: -grad_sigma Xi - lambda
//   Literal:    -grad_sigma Xi + lambda
enum class MultiplierSign { Lagrangian, Literal };

struct ResidualForm {
  SlackSign slack = SlackSign::Slack;
  MultiplierSign multiplier = MultiplierSign::Lagrangian;

  double multiplier_factor() const {
    return multiplier == MultiplierSign::Lagrangian ? -1.0 : 1.0;
  }
};

struct CprasParams {
  // Potential weight; nullopt selects (n + 4m) / 2.
  std::optional<double> eta;
  double delta0 = 0.3;
  double gamma1 = 0.01;
  double gamma2 = 0.9;
  double beta = 0.1;
  double epsilon = 1e-10;
  int max_outer = 200;
  int max_backtracks = 60;
  LsqrOptions lsqr;
  double x0 = 1.0;
  double sigma0 = 10.0;
  double lambda0 = 1.0;
  // Initial slack w0 = sigma0 + delta0 + slack_gap, so block b starts at slack_gap.
  double slack_gap = 30.0;
  double delta_floor = 1e-16;
  // When the least-squares step is not a descent direction for psi, retry
  // without the d = lambda rows (square system).
  bool square_fallback = true;
  ResidualForm form;

  double eta_for(Index n, Index m) const;
  void validate(Index n, Index m) const;
};

// Residual H_delta(z) split into its four blocks:
//   a = (grad_x Xi ; -grad_sigma Xi -/+ lambda), b = slack, c = w o lambda, d = lambda.
struct ResidualBlocks {
  Vector a;
  Vector b;
  Vector c;
  Vector d;

  Vector stacked() const;
  static ResidualBlocks split(const Vector& v, Index n, Index m);
};

CprasState initial_state(const SnlInstance& inst, const CprasParams& params);

// Interior of the feasible set: lambda, w > 0 and blocks b, c, d > 0.
bool is_interior(const CprasState& z, const ResidualBlocks& h);

ResidualBlocks residual_h_delta(const CprasState& z, const SnlInstance& inst,
                                const ResidualForm& form = {});

Vector stack_state(const CprasState& z);
CprasState unstack_state(const Vector& v, Index n, Index m, double delta);

// (n + 4m) x (n + 3m) Jacobian of H_delta at z. Directions are laid out as
// (dx, dsigma, dlambda, dw).
LinearOperator jacobian_operator(const CprasState& z, const SnlInstance& inst,
                                 const ResidualForm& form = {});

double potential_value(const ResidualBlocks& u, double eta);
ResidualBlocks potential_gradient(const ResidualBlocks& u, double eta);

// psi(z) = p(H_delta(z)); throws BoundaryViolation outside the interior.
double merit_value(const CprasState& z, const SnlInstance& inst, double eta,
                   const ResidualForm& form = {});
// J^T grad p(H_delta(z)).
Vector merit_gradient(const CprasState& z, const SnlInstance& inst, double eta,
                      const ResidualForm& form = {});

struct Direction {
  Vector d;
  int lsqr_iters = 0;
  bool lsqr_converged = false;
};

// Least-squares Newton step for J d + H - beta (o^T H / |o|^2) o with o the
// indicator of block b. drop_multiplier_rows solves only the first n + 3m rows.
Direction newton_direction(const CprasState& z, const SnlInstance& inst, double beta,
                           const CprasParams& params, bool drop_multiplier_rows = false);

struct StepResult {
  double alpha = 0.0;
  int backtracks = 0;
  double psi = 0.0;
  double psi_new = 0.0;
  double grad_dot_d = 0.0;
};

// Backtracking over alpha = 1, 1/2, 1/4, ... keeping the iterate interior
// and requiring psi(z + alpha d) <= psi(z) + gamma1 alpha grad psi . d.
StepResult line_search(const CprasState& z, const Vector& d, const SnlInstance& inst,
                       const CprasParams& params);

SolveReport solve(const SnlInstance& inst, const CprasParams& params,
                  const std::optional<CprasState>& initial = std::nullopt);

}  // namespace cando
