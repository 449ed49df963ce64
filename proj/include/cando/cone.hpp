#pragma once

#include <optional>

#include "cando/canonical.hpp"
#include "cando/numerics.hpp"
#include "cando/report.hpp"

namespace cando {

// Iterate of the matrix-cone solver: multiplier L and slack W are symmetric n x n.
struct ConeIterate {
  Vector x;
  Vector sigma;
  Matrix L;
  Matrix W;
};

// H(z) = (a, B, C, D) with a = (grad_x Xi ; -grad_sigma Xi - v), v_k = L . C_k,
// B = W - G(sigma), C = (LW + WL) / 2, D = L.
struct ConeResidual {
  Vector a;
  Matrix B;
  Matrix C;
  Matrix D;

  double squared_norm() const;
  // Frobenius inner product over all four blocks.
  double dot(const ConeResidual& other) const;
};

struct ConeParams {
  // Potential weight; nullopt selects (4n + m) / 2.
  std::optional<double> eta;
  double gamma1 = 0.01;
  double beta = 0.1;
  double epsilon = 1e-10;
  int max_outer = 200;
  int max_backtracks = 60;
  double x0 = 1.0;
  double sigma0 = 10.0;
  // L0 = multiplier0 * I, W0 = G(sigma0) + slack_shift * I.
  double multiplier0 = 1.0;
  double slack_shift = 1.0;
  // Directions with at most this many unknowns use a dense orthogonal
  // factorization; larger ones go through LSQR.
  Index dense_max_cols = 3000;
  LsqrOptions lsqr;
  // Retry without the D = L rows when the least-squares step is not descent.
  bool square_fallback = true;

  double eta_for(Index n, Index m) const;
  void validate(Index n, Index m) const;
};

constexpr Index kConeMaxDim = 200;

ConeIterate cone_initial_iterate(const QuadraticCanonicalProblem& p, const ConeParams& params);

ConeResidual residual_h_cone(const ConeIterate& z, const QuadraticCanonicalProblem& p);

// Directional derivative of residual_h_cone at z along d (same layout as z).
ConeResidual cone_jacobian_apply(const ConeIterate& z, const QuadraticCanonicalProblem& p,
                                 const ConeIterate& d);

// Full-vectorization layout: (x, sigma, vec L, vec W) and (a, vec B, vec C, vec D),
// matrices stored column-major.
Vector vectorize(const ConeIterate& z);
ConeIterate devectorize(const Vector& v, Index n, Index m);
Vector vectorize(const ConeResidual& u);
ConeResidual devectorize_residual(const Vector& v, Index n, Index m);

// (n + m + 3n^2) x (n + m + 2n^2) operator of the vectorized Jacobian.
LinearOperator cone_jacobian_operator(const ConeIterate& z, const QuadraticCanonicalProblem& p);

// Both throw BoundaryViolation unless B, C, D are positive definite.
double cone_potential(const ConeResidual& u, double eta);
ConeResidual cone_potential_gradient(const ConeResidual& u, double eta);

// Least-squares Newton step for Q(z, d) + H(z) - beta (o . H / |o|^2) o with
// o = (0, I, 0, 0). dL and dW come back symmetrized. drop_multiplier_rows
// leaves out the D block.
ConeIterate cone_direction(const ConeIterate& z, const QuadraticCanonicalProblem& p,
                           double beta, const ConeParams& params,
                           bool drop_multiplier_rows = false);

struct ConeStep {
  double alpha = 0.0;
  int backtracks = 0;
  double psi = 0.0;
  double psi_new = 0.0;
  double grad_dot_d = 0.0;
};

// L, W, B, C, D positive definite at z.
bool cone_is_interior(const ConeIterate& z, const ConeResidual& h);

ConeStep cone_line_search(const ConeIterate& z, const ConeIterate& d,
                          const QuadraticCanonicalProblem& p, const ConeParams& params);

SolveReport cone_solve(const QuadraticCanonicalProblem& p, const ConeParams& params,
                       const std::optional<ConeIterate>& initial = std::nullopt);

}  // namespace cando
