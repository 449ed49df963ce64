#include "cando/cone.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "cando/error.hpp"
#include "cando/log.hpp"

namespace cando {

double ConeResidual::squared_norm() const {
  return a.squaredNorm() + B.squaredNorm() + C.squaredNorm() + D.squaredNorm();
}

double ConeResidual::dot(const ConeResidual& o) const {
  return a.dot(o.a) + B.cwiseProduct(o.B).sum() + C.cwiseProduct(o.C).sum() +
         D.cwiseProduct(o.D).sum();
}

double ConeParams::eta_for(Index n, Index m) const {
  return eta ? *eta : 0.5 * static_cast<double>(4 * n + m);
}

void ConeParams::validate(Index n, Index m) const {
  require(eta_for(n, m) > 1.5 * static_cast<double>(n), ErrorCode::InvalidArgument,
          "cone: eta must exceed 3n/2");
  require(gamma1 > 0.0 && gamma1 < 1.0, ErrorCode::InvalidArgument, "cone: gamma1 must be in (0,1)");
  require(beta > 0.0 && beta < 1.0 / 3.0, ErrorCode::InvalidArgument,
          "cone: beta must be in (0, 1/3)");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "cone: epsilon must be positive");
  require(max_outer >= 0 && max_backtracks >= 1, ErrorCode::InvalidArgument,
          "cone: iteration limits must be non-negative");
  require(multiplier0 > 0.0 && slack_shift > 0.0, ErrorCode::InvalidArgument,
          "cone: initial multiplier and slack shift must be positive");
  require(lsqr.rel_tol > 0.0, ErrorCode::InvalidArgument, "cone: lsqr tolerance must be positive");
}

namespace {

void check_iterate(const ConeIterate& z, const QuadraticCanonicalProblem& p) {
  const Index n = p.n;
  require(z.x.size() == n && z.sigma.size() == p.m && z.L.rows() == n && z.L.cols() == n &&
              z.W.rows() == n && z.W.cols() == n,
          ErrorCode::DimensionMismatch, "cone: iterate dimensions do not match the problem");
}

bool is_pd(const Matrix& m) {
  if (!m.allFinite()) return false;
  Eigen::LLT<Matrix> llt(m);
  return llt.info() == Eigen::Success;
}

Matrix sym(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// log det and inverse of a symmetric positive definite matrix.
double logdet_pd(const Matrix& m, Matrix* inverse) {
  Eigen::LLT<Matrix> llt(sym(m));
  require(llt.info() == Eigen::Success, ErrorCode::BoundaryViolation,
          "cone potential: blocks B, C, D must be positive definite");
  const Matrix l = llt.matrixL();
  double out = 0.0;
  for (Index i = 0; i < l.rows(); ++i) out += 2.0 * std::log(l(i, i));
  if (inverse) *inverse = llt.solve(Matrix::Identity(m.rows(), m.cols()));
  return out;
}

}  // namespace

ConeIterate cone_initial_iterate(const QuadraticCanonicalProblem& p, const ConeParams& params) {
  ConeIterate z;
  z.x = Vector::Constant(p.n, params.x0);
  z.sigma = Vector::Constant(p.m, params.sigma0);
  z.L = params.multiplier0 * Matrix::Identity(p.n, p.n);
  z.W = g_of_sigma(p, z.sigma) + params.slack_shift * Matrix::Identity(p.n, p.n);
  return z;
}

ConeResidual residual_h_cone(const ConeIterate& z, const QuadraticCanonicalProblem& p) {
  check_iterate(z, p);
  ConeResidual u;
  u.a = gamma_residual(p, z.x, z.sigma);
  u.a.tail(p.m) -= multiplier_contraction(p, z.L);
  u.B = z.W - g_of_sigma(p, z.sigma);
  u.C = 0.5 * (z.L * z.W + z.W * z.L);
  u.D = z.L;
  return u;
}

ConeResidual cone_jacobian_apply(const ConeIterate& z, const QuadraticCanonicalProblem& p,
                                 const ConeIterate& d) {
  check_iterate(z, p);
  check_iterate(d, p);
  const Index n = p.n;
  const Matrix g = g_of_sigma(p, z.sigma);
  const Matrix jc = cross_jacobian(p, z.x);
  const Matrix hv = p.vstar(z.sigma).hessian;
  ConeResidual out;
  out.a.resize(n + p.m);
  out.a.head(n) = g * d.x + jc * d.sigma;
  out.a.tail(p.m) = -jc.transpose() * d.x + hv * d.sigma - multiplier_contraction(p, d.L);
  out.B = d.W - g_linear(p, d.sigma);
  out.C = 0.5 * (d.L * z.W + z.W * d.L + z.L * d.W + d.W * z.L);
  out.D = d.L;
  return out;
}

Vector vectorize(const ConeIterate& z) {
  const Index n = z.x.size();
  const Index m = z.sigma.size();
  Vector v(n + m + 2 * n * n);
  v << z.x, z.sigma, z.L.reshaped(), z.W.reshaped();
  return v;
}

ConeIterate devectorize(const Vector& v, Index n, Index m) {
  require(v.size() == n + m + 2 * n * n, ErrorCode::DimensionMismatch,
          "cone: wrong vectorized iterate length");
  ConeIterate z;
  z.x = v.head(n);
  z.sigma = v.segment(n, m);
  z.L = v.segment(n + m, n * n).reshaped(n, n);
  z.W = v.tail(n * n).reshaped(n, n);
  return z;
}

Vector vectorize(const ConeResidual& u) {
  const Index n = u.B.rows();
  Vector v(u.a.size() + 3 * n * n);
  v << u.a, u.B.reshaped(), u.C.reshaped(), u.D.reshaped();
  return v;
}

ConeResidual devectorize_residual(const Vector& v, Index n, Index m) {
  require(v.size() == n + m + 3 * n * n, ErrorCode::DimensionMismatch,
          "cone: wrong vectorized residual length");
  ConeResidual u;
  u.a = v.head(n + m);
  u.B = v.segment(n + m, n * n).reshaped(n, n);
  u.C = v.segment(n + m + n * n, n * n).reshaped(n, n);
  u.D = v.tail(n * n).reshaped(n, n);
  return u;
}

LinearOperator cone_jacobian_operator(const ConeIterate& z, const QuadraticCanonicalProblem& p) {
  check_iterate(z, p);
  const Index n = p.n;
  const Index m = p.m;
  auto g = std::make_shared<const Matrix>(g_of_sigma(p, z.sigma));
  auto jc = std::make_shared<const Matrix>(cross_jacobian(p, z.x));
  auto hv = std::make_shared<const Matrix>(p.vstar(z.sigma).hessian);
  auto l = std::make_shared<const Matrix>(z.L);
  auto w = std::make_shared<const Matrix>(z.W);
  auto prob = std::make_shared<const QuadraticCanonicalProblem>(p);

  LinearOperator op;
  op.rows = n + m + 3 * n * n;
  op.cols = n + m + 2 * n * n;
  op.apply = [=](const Vector& v) -> Vector {
    const ConeIterate d = devectorize(v, n, m);
    ConeResidual out;
    out.a.resize(n + m);
    out.a.head(n) = (*g) * d.x + (*jc) * d.sigma;
    out.a.tail(m) =
        -jc->transpose() * d.x + (*hv) * d.sigma - multiplier_contraction(*prob, d.L);
    out.B = d.W - g_linear(*prob, d.sigma);
    out.C = 0.5 * (d.L * (*w) + (*w) * d.L + (*l) * d.W + d.W * (*l));
    out.D = d.L;
    return vectorize(out);
  };
  op.apply_transpose = [=](const Vector& r) -> Vector {
    const ConeResidual u = devectorize_residual(r, n, m);
    const auto r1 = u.a.head(n);
    const auto r2 = u.a.tail(m);
    ConeIterate out;
    out.x = (*g) * r1 - (*jc) * r2;
    out.sigma = jc->transpose() * r1 + hv->transpose() * r2 - multiplier_contraction(*prob, u.B);
    out.L = 0.5 * (u.C * (*w) + (*w) * u.C) + u.D;
    for (Index k = 0; k < m; ++k) out.L -= r2[k] * prob->C[static_cast<std::size_t>(k)];
    out.W = u.B + 0.5 * ((*l) * u.C + u.C * (*l));
    return vectorize(out);
  };
  return op;
}

double cone_potential(const ConeResidual& u, double eta) {
  const double tau = u.squared_norm();
  const double lb = logdet_pd(u.B, nullptr);
  const double lc = logdet_pd(u.C, nullptr);
  const double ld = logdet_pd(u.D, nullptr);
  require(tau > 0.0, ErrorCode::InvalidArgument, "cone potential: zero residual");
  return eta * std::log(tau) - lb - lc - ld;
}

ConeResidual cone_potential_gradient(const ConeResidual& u, double eta) {
  Matrix bi, ci, di;
  logdet_pd(u.B, &bi);
  logdet_pd(u.C, &ci);
  logdet_pd(u.D, &di);
  const double tau = u.squared_norm();
  require(tau > 0.0, ErrorCode::InvalidArgument, "cone potential: zero residual");
  const double s = 2.0 * eta / tau;
  return {s * u.a, s * u.B - bi, s * u.C - ci, s * u.D - di};
}

bool cone_is_interior(const ConeIterate& z, const ConeResidual& h) {
  return is_pd(z.L) && is_pd(z.W) && is_pd(h.B) && is_pd(h.C) && is_pd(h.D);
}

ConeIterate cone_direction(const ConeIterate& z, const QuadraticCanonicalProblem& p,
                           double beta, const ConeParams& params, bool drop_multiplier_rows) {
  const Index n = p.n;
  const Index m = p.m;
  ConeResidual target = residual_h_cone(z, p);
  if (n > 0) {
    const double centering = beta * target.B.trace() / static_cast<double>(n);
    target.B -= centering * Matrix::Identity(n, n);
  }
  Vector rhs = -vectorize(target);
  LinearOperator jac = cone_jacobian_operator(z, p);
  if (drop_multiplier_rows) {
    const Index keep = jac.rows - n * n;
    const LinearOperator full = jac;
    jac.rows = keep;
    jac.apply = [full, keep](const Vector& v) -> Vector { return full.apply(v).head(keep); };
    jac.apply_transpose = [full, keep](const Vector& u) -> Vector {
      Vector e = Vector::Zero(full.rows);
      e.head(keep) = u;
      return full.apply_transpose(e);
    };
    rhs = rhs.head(keep).eval();
  }

  Vector sol;
  if (jac.cols <= params.dense_max_cols) {
    const Matrix dense = jac.to_dense();
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(dense);
    sol = cod.solve(rhs);
  } else {
    LsqrResult ls;
    try {
      ls = lsqr_least_squares(jac, rhs, params.lsqr);
    } catch (const Error& e) {
      fail(ErrorCode::NumericalBreakdown, std::string("cone direction: ") + e.what());
    }
    sol = std::move(ls.x);
  }
  require(sol.allFinite(), ErrorCode::NumericalBreakdown, "cone direction: non-finite solution");
  ConeIterate d = devectorize(sol, n, m);
  d.L = sym(d.L);
  d.W = sym(d.W);
  return d;
}

namespace {

ConeIterate axpy(const ConeIterate& z, double alpha, const ConeIterate& d) {
  return {z.x + alpha * d.x, z.sigma + alpha * d.sigma, z.L + alpha * d.L, z.W + alpha * d.W};
}

}  // namespace

ConeStep cone_line_search(const ConeIterate& z, const ConeIterate& d,
                          const QuadraticCanonicalProblem& p, const ConeParams& params) {
  check_iterate(d, p);
  const double eta = params.eta_for(p.n, p.m);
  const ConeResidual h = residual_h_cone(z, p);
  require(cone_is_interior(z, h), ErrorCode::BoundaryViolation,
          "cone line search: start is not interior");

  ConeStep step;
  step.psi = cone_potential(h, eta);
  step.grad_dot_d = cone_potential_gradient(h, eta).dot(cone_jacobian_apply(z, p, d));
  require(step.grad_dot_d < 0.0, ErrorCode::InvalidArgument,
          "cone line search: direction is not a descent direction (grad psi . d = " +
              std::to_string(step.grad_dot_d) + ")");

  double alpha = 1.0;
  for (int bt = 0; bt <= params.max_backtracks; ++bt, alpha *= 0.5) {
    const ConeIterate trial = axpy(z, alpha, d);
    if (!is_pd(trial.L) || !is_pd(trial.W)) continue;
    const ConeResidual ht = residual_h_cone(trial, p);
    if (!is_pd(ht.B) || !is_pd(ht.C) || !is_pd(ht.D)) continue;
    const double psi_t = cone_potential(ht, eta);
    if (std::isfinite(psi_t) && psi_t <= step.psi + params.gamma1 * alpha * step.grad_dot_d) {
      step.alpha = alpha;
      step.backtracks = bt;
      step.psi_new = psi_t;
      return step;
    }
  }
  fail(ErrorCode::LineSearchFailure, "cone line search: no acceptable step after " +
                                         std::to_string(params.max_backtracks) + " backtracks");
}

SolveReport cone_solve(const QuadraticCanonicalProblem& p, const ConeParams& params,
                       const std::optional<ConeIterate>& initial) {
  p.validate();
  require(p.n <= kConeMaxDim, ErrorCode::SizeGuard,
          "cone: primal dimension exceeds the dense limit of " + std::to_string(kConeMaxDim));
  params.validate(p.n, p.m);
  const double eta = params.eta_for(p.n, p.m);

  SolveReport report;
  report.solver = "cone";
  ConeIterate z = initial ? *initial : cone_initial_iterate(p, params);
  check_iterate(z, p);

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };
  auto finish = [&](SolveStatus status, std::string message) {
    report.status = status;
    report.message = std::move(message);
    report.x = z.x;
    report.sigma = z.sigma;
    report.wall_time_s = elapsed();
    log::info("cone: ", to_string(status), " after ", report.iterations,
              " iterations, |Gamma|^2 = ", report.final_gamma_sq);
    return report;
  };

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    rec.gamma_sq = gamma_residual(p, z.x, z.sigma).squaredNorm();
    if (k == 0) report.initial_gamma_sq = rec.gamma_sq;
    report.final_gamma_sq = rec.gamma_sq;
    report.iterations = k;

    const ConeResidual h = residual_h_cone(z, p);
    if (!std::isfinite(rec.gamma_sq) || !cone_is_interior(z, h)) {
      rec.elapsed_s = elapsed();
      report.trace.push_back(rec);
      return finish(SolveStatus::NumericalBreakdown,
                    std::isfinite(rec.gamma_sq) ? "iterate left the interior" : "non-finite residual");
    }
    rec.psi = cone_potential(h, eta);
    report.max_residual_norm = std::max(report.max_residual_norm, std::sqrt(h.squared_norm()));
    report.max_iterate_norm = std::max(report.max_iterate_norm, vectorize(z).norm());

    if (rec.gamma_sq < params.epsilon) {
      rec.elapsed_s = elapsed();
      report.trace.push_back(rec);
      return finish(SolveStatus::Converged, "");
    }
    if (k >= params.max_outer) {
      rec.elapsed_s = elapsed();
      report.trace.push_back(rec);
      return finish(SolveStatus::MaxIterations, "iteration limit reached");
    }

    ConeIterate d;
    ConeStep step;
    try {
      d = cone_direction(z, p, params.beta, params);
      if (params.square_fallback &&
          cone_potential_gradient(h, eta).dot(cone_jacobian_apply(z, p, d)) >= 0.0) {
        d = cone_direction(z, p, params.beta, params, true);
        rec.fallback = true;
        ++report.fallback_directions;
        log::debug("cone it ", k, ": least-squares step is not descent, using square system");
      }
      step = cone_line_search(z, d, p, params);
    } catch (const Error& e) {
      rec.elapsed_s = elapsed();
      report.trace.push_back(rec);
      if (e.code() == ErrorCode::InvalidArgument) {
        ++report.descent_violations;
        return finish(SolveStatus::NumericalBreakdown, e.what());
      }
      if (e.code() == ErrorCode::LineSearchFailure) {
        return finish(SolveStatus::LineSearchFailure, e.what());
      }
      return finish(SolveStatus::NumericalBreakdown, e.what());
    }
    rec.alpha = step.alpha;
    rec.backtracks = step.backtracks;
    rec.grad_dot_d = step.grad_dot_d;
    if (!(step.psi_new < step.psi)) ++report.increase_violations;
    z = axpy(z, step.alpha, d);
    rec.elapsed_s = elapsed();
    log::debug("cone it ", k, ": |Gamma|^2=", rec.gamma_sq, " psi=", rec.psi, " alpha=", rec.alpha,
               " gd=", rec.grad_dot_d);
    report.trace.push_back(rec);
  }
}

}  // namespace cando
