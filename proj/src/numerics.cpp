#include "cando/numerics.hpp"

#include <cmath>
#include <memory>
#include <utility>

#include "cando/error.hpp"

namespace cando {

LinearOperator LinearOperator::from_dense(Matrix m) {
  LinearOperator op;
  op.rows = m.rows();
  op.cols = m.cols();
  auto shared = std::make_shared<const Matrix>(std::move(m));
  op.apply = [shared](const Vector& v) -> Vector { return (*shared) * v; };
  op.apply_transpose = [shared](const Vector& v) -> Vector {
    return shared->transpose() * v;
  };
  return op;
}

LinearOperator LinearOperator::from_sparse(SparseMatrix m) {
  LinearOperator op;
  op.rows = m.rows();
  op.cols = m.cols();
  auto shared = std::make_shared<const SparseMatrix>(std::move(m));
  op.apply = [shared](const Vector& v) -> Vector { return (*shared) * v; };
  op.apply_transpose = [shared](const Vector& v) -> Vector {
    return shared->transpose() * v;
  };
  return op;
}

Matrix LinearOperator::to_dense() const {
  Matrix out(rows, cols);
  Vector e = Vector::Zero(cols);
  for (Index j = 0; j < cols; ++j) {
    e[j] = 1.0;
    out.col(j) = apply(e);
    e[j] = 0.0;
  }
  return out;
}

LsqrResult lsqr_least_squares(const LinearOperator& a, const Vector& b,
                              const LsqrOptions& options) {
  require(a.rows == b.size(), ErrorCode::DimensionMismatch,
          "lsqr: operator rows do not match right-hand side length");
  require(options.rel_tol > 0.0, ErrorCode::InvalidArgument,
          "lsqr: rel_tol must be positive");
  require(b.allFinite(), ErrorCode::NonFinite,
          "lsqr: right-hand side has non-finite entries");

  const int max_iter =
      options.max_iter > 0 ? options.max_iter : static_cast<int>(10 * a.cols);

  LsqrResult result;
  result.x = Vector::Zero(a.cols);

  Vector u = b;
  double beta = u.norm();
  if (beta == 0.0) {
    result.converged = true;
    return result;
  }
  u /= beta;
  Vector v = a.apply_transpose(u);
  double alpha = v.norm();
  result.normal_rhs = alpha * beta;
  if (alpha == 0.0) {
    result.converged = true;
    return result;
  }
  v /= alpha;

  Vector w = v;
  double phibar = beta;
  double rhobar = alpha;
  const double target = options.rel_tol * result.normal_rhs;

  for (int it = 1; it <= max_iter; ++it) {
    u = a.apply(v) - alpha * u;
    beta = u.norm();
    if (beta > 0.0) u /= beta;

    v = a.apply_transpose(u) - beta * v;
    alpha = v.norm();
    if (alpha > 0.0) v /= alpha;

    const double rho = std::hypot(rhobar, beta);
    const double c = rhobar / rho;
    const double s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    result.x += (phi / rho) * w;
    w = v - (theta / rho) * w;
    result.iterations = it;

    if (!std::isfinite(phibar) || !result.x.allFinite()) {
      fail(ErrorCode::NumericalBreakdown, "lsqr: non-finite iterate");
    }
    const double normal_estimate = phibar * alpha * std::abs(c);
    if (normal_estimate <= target || alpha == 0.0) {
      result.converged = true;
      break;
    }
  }

  const Vector r = a.apply(result.x) - b;
  result.normal_residual = a.apply_transpose(r).norm();
  return result;
}

Matrix finite_difference_jacobian(const VectorFunction& f, const Vector& x,
                                  double step) {
  require(step > 0.0, ErrorCode::InvalidArgument,
          "finite_difference_jacobian: step must be positive");
  const Vector f0 = f(x);
  require(f0.allFinite(), ErrorCode::NonFinite,
          "finite_difference_jacobian: f(x) is not finite");
  Matrix jac(f0.size(), x.size());
  Vector xp = x;
  for (Index j = 0; j < x.size(); ++j) {
    xp[j] = x[j] + step;
    const Vector fp = f(xp);
    xp[j] = x[j] - step;
    const Vector fm = f(xp);
    xp[j] = x[j];
    require(fp.allFinite() && fm.allFinite(), ErrorCode::NonFinite,
            "finite_difference_jacobian: non-finite function value");
    jac.col(j) = (fp - fm) / (2.0 * step);
  }
  return jac;
}

double default_fd_step(const Vector& x) {
  const double scale = x.size() > 0 ? x.lpNorm<Eigen::Infinity>() : 0.0;
  return 1e-6 * (1.0 + scale);
}

namespace {

constexpr Index kDenseEigenLimit = 2000;

void require_symmetric(const Matrix& m) {
  require(m.rows() == m.cols(), ErrorCode::DimensionMismatch,
          "smallest_eigenvalue: matrix is not square");
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double asym = (m - m.transpose()).cwiseAbs().maxCoeff();
  require(asym <= 1e-12 * scale, ErrorCode::Asymmetric,
          "smallest_eigenvalue: matrix is not symmetric");
}

// Power iteration on (shift I - M), where shift bounds the spectrum from above.
double shifted_power_min(const Matrix& m) {
  const Index n = m.rows();
  double shift = 0.0;
  for (Index i = 0; i < n; ++i) {
    shift = std::max(shift, m(i, i) + (m.row(i).cwiseAbs().sum() - std::abs(m(i, i))));
  }
  Vector v = Vector::Ones(n) / std::sqrt(static_cast<double>(n));
  // Deterministic perturbation so v is not orthogonal to the target vector.
  for (Index i = 0; i < n; ++i) v[i] += 1e-3 * std::sin(static_cast<double>(i + 1));
  v.normalize();
  double mu = 0.0;
  for (int it = 0; it < 100000; ++it) {
    Vector y = shift * v - m * v;
    const double next = v.dot(y);
    const double norm = y.norm();
    if (norm == 0.0) return shift;
    v = y / norm;
    if (it > 0 && std::abs(next - mu) <= 1e-14 * std::max(1.0, std::abs(next))) {
      mu = next;
      break;
    }
    mu = next;
  }
  return shift - mu;
}

}  // namespace

double smallest_eigenvalue(const Matrix& m) {
  require_symmetric(m);
  if (m.rows() == 0) return 0.0;
  if (m.rows() <= kDenseEigenLimit) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m, Eigen::EigenvaluesOnly);
    require(solver.info() == Eigen::Success, ErrorCode::NumericalBreakdown,
            "smallest_eigenvalue: eigensolver failed");
    return solver.eigenvalues()[0];
  }
  return shifted_power_min(m);
}

bool is_positive_definite(const Matrix& m) {
  if (m.rows() != m.cols()) return false;
  if (!m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::Asymmetric: return "Asymmetric";
    case ErrorCode::SingularG: return "SingularG";
    case ErrorCode::BoundaryViolation: return "BoundaryViolation";
    case ErrorCode::MissingOracle: return "MissingOracle";
    case ErrorCode::MissingTruth: return "MissingTruth";
    case ErrorCode::SizeGuard: return "SizeGuard";
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::VersionMismatch: return "VersionMismatch";
    case ErrorCode::LineSearchFailure: return "LineSearchFailure";
    case ErrorCode::NumericalBreakdown: return "NumericalBreakdown";
  }
  return "Unknown";
}

}  // namespace cando
