#pragma once

#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace cando {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

// Matrix-free linear map y = M v with its adjoint.
struct LinearOperator {
  Index rows = 0;
  Index cols = 0;
  std::function<Vector(const Vector&)> apply;
  std::function<Vector(const Vector&)> apply_transpose;

  static LinearOperator from_dense(Matrix m);
  static LinearOperator from_sparse(SparseMatrix m);

  // Materializes the operator column by column. Intended for small problems
  // and tests only.
  Matrix to_dense() const;
};

struct LsqrOptions {
  double rel_tol = 1e-12;
  // 0 selects 10 * cols.
  int max_iter = 0;
};

struct LsqrResult {
  Vector x;
  int iterations = 0;
  bool converged = false;
  // ||A^T (A x - b)|| recomputed from the returned x.
  double normal_residual = 0.0;
  // ||A^T b|| for scaling.
  double normal_rhs = 0.0;
};

// Paige-Saunders LSQR started from x = 0, so consistent rank-deficient
// problems return the minimum norm solution.
LsqrResult lsqr_least_squares(const LinearOperator& a, const Vector& b,
                              const LsqrOptions& options = {});

using VectorFunction = std::function<Vector(const Vector&)>;

// Central differences, column j = (f(x + h e_j) - f(x - h e_j)) / (2h).
Matrix finite_difference_jacobian(const VectorFunction& f, const Vector& x,
                                  double step);

// 1e-6 * (1 + ||x||_inf)
double default_fd_step(const Vector& x);

// Smallest eigenvalue of a symmetric matrix. Throws Asymmetric when the
// input deviates from symmetry by more than 1e-12 (relative to its scale).
double smallest_eigenvalue(const Matrix& m);

// Cholesky attempt; cheaper than an eigenvalue probe for interior checks.
bool is_positive_definite(const Matrix& m);

}  // namespace cando
