#include "cando/canonical.hpp"

#include <cmath>
#include <string>

#include "cando/error.hpp"

namespace cando {

ConjugateEval QuadraticConjugate::operator()(const Vector& sigma) const {
  require(sigma.size() == q.size(), ErrorCode::DimensionMismatch,
          "quadratic conjugate: sigma has wrong length");
  ConjugateEval out;
  out.value = 0.5 * sigma.squaredNorm() + q.dot(sigma);
  out.gradient = sigma + q;
  out.hessian = Matrix::Identity(q.size(), q.size());
  return out;
}

double QuadraticConjugate::primal(const Vector& xi) const {
  require(xi.size() == q.size(), ErrorCode::DimensionMismatch,
          "quadratic conjugate: xi has wrong length");
  return 0.5 * (xi - q).squaredNorm();
}

namespace {

bool symmetric(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

void check_x(const QuadraticCanonicalProblem& p, const Vector& x) {
  require(x.size() == p.n, ErrorCode::DimensionMismatch,
          "canonical problem: x has length " + std::to_string(x.size()) +
              ", expected " + std::to_string(p.n));
}

void check_sigma(const QuadraticCanonicalProblem& p, const Vector& sigma) {
  require(sigma.size() == p.m, ErrorCode::DimensionMismatch,
          "canonical problem: sigma has length " + std::to_string(sigma.size()) +
              ", expected " + std::to_string(p.m));
}

ConjugateEval eval_vstar(const QuadraticCanonicalProblem& p, const Vector& sigma) {
  require(static_cast<bool>(p.vstar), ErrorCode::MissingOracle,
          "canonical problem: no V* oracle");
  return p.vstar(sigma);
}

}  // namespace

void QuadraticCanonicalProblem::validate() const {
  require(A.rows() == n && A.cols() == n, ErrorCode::DimensionMismatch,
          "canonical problem: A must be n x n");
  require(c.size() == n, ErrorCode::DimensionMismatch, "canonical problem: c must have length n");
  require(static_cast<Index>(C.size()) == m && static_cast<Index>(b.size()) == m,
          ErrorCode::DimensionMismatch, "canonical problem: need m matrices C_k and vectors b_k");
  require(symmetric(A), ErrorCode::Asymmetric, "canonical problem: A is not symmetric");
  for (Index k = 0; k < m; ++k) {
    require(C[k].rows() == n && C[k].cols() == n, ErrorCode::DimensionMismatch,
            "canonical problem: C_k must be n x n");
    require(b[k].size() == n, ErrorCode::DimensionMismatch,
            "canonical problem: b_k must have length n");
    require(symmetric(C[k]), ErrorCode::Asymmetric,
            "canonical problem: C_" + std::to_string(k) + " is not symmetric");
  }
  require(static_cast<bool>(vstar), ErrorCode::MissingOracle, "canonical problem: no V* oracle");
}

Vector lambda_eval(const QuadraticCanonicalProblem& p, const Vector& x) {
  check_x(p, x);
  Vector xi(p.m);
  for (Index k = 0; k < p.m; ++k) {
    xi[k] = 0.5 * x.dot(p.C[k] * x) - x.dot(p.b[k]);
  }
  return xi;
}

Matrix g_linear(const QuadraticCanonicalProblem& p, const Vector& dsigma) {
  check_sigma(p, dsigma);
  Matrix g = Matrix::Zero(p.n, p.n);
  for (Index k = 0; k < p.m; ++k) {
    if (dsigma[k] != 0.0) g += dsigma[k] * p.C[k];
  }
  return g;
}

Matrix g_of_sigma(const QuadraticCanonicalProblem& p, const Vector& sigma) {
  return p.A + g_linear(p, sigma);
}

Vector f_of_sigma(const QuadraticCanonicalProblem& p, const Vector& sigma) {
  check_sigma(p, sigma);
  Vector f = p.c;
  for (Index k = 0; k < p.m; ++k) f += sigma[k] * p.b[k];
  return f;
}

Matrix cross_jacobian(const QuadraticCanonicalProblem& p, const Vector& x) {
  check_x(p, x);
  Matrix out(p.n, p.m);
  for (Index k = 0; k < p.m; ++k) out.col(k) = p.C[k] * x - p.b[k];
  return out;
}

Vector multiplier_contraction(const QuadraticCanonicalProblem& p, const Matrix& l) {
  require(l.rows() == p.n && l.cols() == p.n, ErrorCode::DimensionMismatch,
          "multiplier_contraction: L must be n x n");
  Vector v(p.m);
  for (Index k = 0; k < p.m; ++k) v[k] = l.cwiseProduct(p.C[k]).sum();
  return v;
}

double xi_value(const QuadraticCanonicalProblem& p, const Vector& x, const Vector& sigma) {
  check_x(p, x);
  check_sigma(p, sigma);
  const ConjugateEval vs = eval_vstar(p, sigma);
  return 0.5 * x.dot(g_of_sigma(p, sigma) * x) - f_of_sigma(p, sigma).dot(x) - vs.value;
}

Vector gamma_residual(const QuadraticCanonicalProblem& p, const Vector& x,
                      const Vector& sigma) {
  check_x(p, x);
  check_sigma(p, sigma);
  Vector out(p.n + p.m);
  out.head(p.n) = g_of_sigma(p, sigma) * x - f_of_sigma(p, sigma);
  out.tail(p.m) = eval_vstar(p, sigma).gradient - lambda_eval(p, x);
  return out;
}

double primal_value(const QuadraticCanonicalProblem& p, const Vector& x) {
  require(static_cast<bool>(p.v_of_xi), ErrorCode::MissingOracle,
          "primal_value: problem has no V oracle");
  check_x(p, x);
  return p.v_of_xi(lambda_eval(p, x)) + 0.5 * x.dot(p.A * x) - p.c.dot(x);
}

namespace {

Eigen::LDLT<Matrix> guarded_factor(const Matrix& g, double tol) {
  const double lmin = smallest_eigenvalue(g);
  require(lmin > tol, ErrorCode::SingularG,
          "G(sigma) is not positive definite (lambda_min = " + std::to_string(lmin) + ")");
  return Eigen::LDLT<Matrix>(g);
}

}  // namespace

double dual_value(const QuadraticCanonicalProblem& p, const Vector& sigma, double tol) {
  check_sigma(p, sigma);
  const Matrix g = g_of_sigma(p, sigma);
  const Vector f = f_of_sigma(p, sigma);
  const auto ldlt = guarded_factor(g, tol);
  const Vector x = ldlt.solve(f);
  return -0.5 * f.dot(x) - eval_vstar(p, sigma).value;
}

Vector recover_primal(const QuadraticCanonicalProblem& p, const Vector& sigma, double tol) {
  check_sigma(p, sigma);
  const Matrix g = g_of_sigma(p, sigma);
  return guarded_factor(g, tol).solve(f_of_sigma(p, sigma));
}

GlobalCertificate certify_global(const QuadraticCanonicalProblem& p, const Vector& x,
                                 const Vector& sigma, double tol) {
  GlobalCertificate cert;
  cert.gamma_norm_sq = gamma_residual(p, x, sigma).squaredNorm();
  cert.stationary = cert.gamma_norm_sq < tol;
  cert.min_eigenvalue = smallest_eigenvalue(g_of_sigma(p, sigma));
  cert.cone = cert.min_eigenvalue >= -tol;
  if (p.v_of_xi) {
    cert.gap = std::abs(primal_value(p, x) - xi_value(p, x, sigma));
  }
  return cert;
}

}  // namespace cando
