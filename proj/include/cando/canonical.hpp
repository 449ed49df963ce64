#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "cando/numerics.hpp"

namespace cando {

// Value, gradient and Hessian of the conjugate V*(sigma).
struct ConjugateEval {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

using ConjugateOracle = std::function<ConjugateEval(const Vector&)>;
using ScalarOracle = std::function<double(const Vector&)>;

// V*(sigma) = 1/2 |sigma|^2 + q^T sigma, whose primal is V(xi) = 1/2 |xi - q|^2.
struct QuadraticConjugate {
  Vector q;

  ConjugateEval operator()(const Vector& sigma) const;
  double primal(const Vector& xi) const;
  Vector primal_gradient(const Vector& xi) const { return xi - q; }
};

// Xi(x, sigma) = 1/2 x^T G(sigma) x - F(sigma)^T x - V*(sigma) with
// G(sigma) = A + sum sigma_k C_k, F(sigma) = c + sum sigma_k b_k and
// Lambda_k(x) = 1/2 x^T C_k x - x^T b_k.
struct QuadraticCanonicalProblem {
  Index n = 0;
  Index m = 0;
  Matrix A;
  Vector c;
  std::vector<Matrix> C;
  std::vector<Vector> b;
  ConjugateOracle vstar;
  // V(xi); only primal_value and certify_global's gap need it.
  ScalarOracle v_of_xi;

  // Checks dimensions and symmetry of A and every C_k.
  void validate() const;
};

struct SaddleCandidate {
  Vector x;
  Vector sigma;
};

Vector lambda_eval(const QuadraticCanonicalProblem& p, const Vector& x);
Matrix g_of_sigma(const QuadraticCanonicalProblem& p, const Vector& sigma);
Vector f_of_sigma(const QuadraticCanonicalProblem& p, const Vector& sigma);

// sum sigma_k C_k without A: the linear part of G.
Matrix g_linear(const QuadraticCanonicalProblem& p, const Vector& dsigma);

// n x m matrix with columns C_k x - b_k (the mixed second derivative of Xi).
Matrix cross_jacobian(const QuadraticCanonicalProblem& p, const Vector& x);

// v_k = L . C_k (Frobenius product).
Vector multiplier_contraction(const QuadraticCanonicalProblem& p, const Matrix& l);

double xi_value(const QuadraticCanonicalProblem& p, const Vector& x, const Vector& sigma);

// (grad_x Xi ; -grad_sigma Xi) = (G x - F ; grad V*(sigma) - Lambda(x)).
Vector gamma_residual(const QuadraticCanonicalProblem& p, const Vector& x,
                      const Vector& sigma);

double primal_value(const QuadraticCanonicalProblem& p, const Vector& x);

constexpr double kSingularTol = 1e-10;

// -1/2 F^T G^{-1} F - V*(sigma); throws SingularG when lambda_min(G) <= tol.
double dual_value(const QuadraticCanonicalProblem& p, const Vector& sigma,
                  double tol = kSingularTol);

// Solves G(sigma) x = F(sigma); throws SingularG like dual_value.
Vector recover_primal(const QuadraticCanonicalProblem& p, const Vector& sigma,
                      double tol = kSingularTol);

struct GlobalCertificate {
  bool stationary = false;
  bool cone = false;
  // |P(x) - Xi(x, sigma)|, absent without a V oracle.
  std::optional<double> gap;
  double gamma_norm_sq = 0.0;
  double min_eigenvalue = 0.0;
};

GlobalCertificate certify_global(const QuadraticCanonicalProblem& p, const Vector& x,
                                 const Vector& sigma, double tol);

}  // namespace cando
