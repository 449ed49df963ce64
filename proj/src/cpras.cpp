#include "cando/cpras.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <string>

#include "cando/error.hpp"
#include "cando/log.hpp"

namespace cando {

double CprasParams::eta_for(Index n, Index m) const {
  return eta ? *eta : 0.5 * static_cast<double>(n + 4 * m);
}

void CprasParams::validate(Index n, Index m) const {
  const double e = eta_for(n, m);
  require(e > 1.5 * static_cast<double>(m), ErrorCode::InvalidArgument,
          "cpras: eta must exceed 3m/2");
  require(gamma1 > 0.0 && gamma1 < 1.0, ErrorCode::InvalidArgument, "cpras: gamma1 must be in (0,1)");
  require(gamma2 > 0.0 && gamma2 < 1.0, ErrorCode::InvalidArgument, "cpras: gamma2 must be in (0,1)");
  require(beta > 0.0 && beta < 1.0 / 3.0, ErrorCode::InvalidArgument,
          "cpras: beta must be in (0, 1/3)");
  require(delta0 > 0.0, ErrorCode::InvalidArgument, "cpras: delta0 must be positive");
  require(epsilon > 0.0, ErrorCode::InvalidArgument, "cpras: epsilon must be positive");
  require(max_outer >= 0 && max_backtracks >= 1, ErrorCode::InvalidArgument,
          "cpras: iteration limits must be non-negative");
  require(lsqr.rel_tol > 0.0, ErrorCode::InvalidArgument, "cpras: lsqr tolerance must be positive");
}

Vector ResidualBlocks::stacked() const {
  Vector out(a.size() + b.size() + c.size() + d.size());
  out << a, b, c, d;
  return out;
}

ResidualBlocks ResidualBlocks::split(const Vector& v, Index n, Index m) {
  require(v.size() == n + 4 * m, ErrorCode::DimensionMismatch, "residual: wrong stacked length");
  return {v.head(n + m), v.segment(n + m, m), v.segment(n + 2 * m, m), v.tail(m)};
}

Vector stack_state(const CprasState& z) {
  Vector out(z.x.size() + 3 * z.sigma.size());
  out << z.x, z.sigma, z.lambda, z.w;
  return out;
}

CprasState unstack_state(const Vector& v, Index n, Index m, double delta) {
  require(v.size() == n + 3 * m, ErrorCode::DimensionMismatch, "state: wrong stacked length");
  return {v.head(n), v.segment(n, m), v.segment(n + m, m), v.tail(m), delta};
}

namespace {

void check_state(const CprasState& z, const SnlInstance& inst) {
  const Index m = inst.m();
  require(z.x.size() == inst.n() && z.sigma.size() == m && z.lambda.size() == m &&
              z.w.size() == m,
          ErrorCode::DimensionMismatch, "cpras: state dimensions do not match the instance");
}

bool all_positive(const Vector& v) { return (v.array() > 0.0).all(); }

}  // namespace

CprasState initial_state(const SnlInstance& inst, const CprasParams& params) {
  const Index m = inst.m();
  CprasState z;
  z.x = Vector::Constant(inst.n(), params.x0);
  z.sigma = Vector::Constant(m, params.sigma0);
  z.lambda = Vector::Constant(m, params.lambda0);
  z.w = Vector::Constant(m, params.sigma0 + params.delta0 + params.slack_gap);
  z.delta = params.delta0;
  return z;
}

bool is_interior(const CprasState& z, const ResidualBlocks& h) {
  return all_positive(z.lambda) && all_positive(z.w) && all_positive(h.b) &&
         all_positive(h.c) && all_positive(h.d);
}

ResidualBlocks residual_h_delta(const CprasState& z, const SnlInstance& inst,
                                const ResidualForm& form) {
  check_state(z, inst);
  const Index n = inst.n();
  const Index m = inst.m();
  ResidualBlocks h;
  h.a.resize(n + m);
  h.a.head(n) = assemble_g(inst, z.sigma) * z.x - assemble_f(inst, z.sigma);
  h.a.tail(m) = z.sigma + squared_distances(inst) - edge_lengths_sq(inst, z.x) +
                form.multiplier_factor() * z.lambda;
  const double shift = form.slack == SlackSign::Slack ? -z.delta : z.delta;
  h.b = z.w - z.sigma + Vector::Constant(m, shift);
  h.c = z.w.cwiseProduct(z.lambda);
  h.d = z.lambda;
  return h;
}

LinearOperator jacobian_operator(const CprasState& z, const SnlInstance& inst,
                                 const ResidualForm& form) {
  check_state(z, inst);
  const double ms = form.multiplier_factor();
  const Index n = inst.n();
  const Index m = inst.m();
  auto g = std::make_shared<const SparseMatrix>(assemble_g(inst, z.sigma));
  auto b = std::make_shared<const SparseMatrix>(cross_hessian(inst, z.x));
  // B^T is applied on every product, so keep an explicit row-major copy.
  auto bt = std::make_shared<const SparseMatrix>(b->transpose());
  auto lambda = std::make_shared<const Vector>(z.lambda);
  auto w = std::make_shared<const Vector>(z.w);

  LinearOperator op;
  op.rows = n + 4 * m;
  op.cols = n + 3 * m;
  op.apply = [=](const Vector& v) -> Vector {
    const auto dx = v.head(n);
    const auto ds = v.segment(n, m);
    const auto dl = v.segment(n + m, m);
    const auto dw = v.tail(m);
    Vector out(n + 4 * m);
    out.head(n) = (*g) * dx + (*b) * ds;
    out.segment(n, m) = -((*bt) * dx) + ds + ms * dl;
    out.segment(n + m, m) = dw - ds;
    out.segment(n + 2 * m, m) = lambda->cwiseProduct(dw) + w->cwiseProduct(dl);
    out.tail(m) = dl;
    return out;
  };
  op.apply_transpose = [=](const Vector& r) -> Vector {
    const auto r1 = r.head(n);
    const auto r2 = r.segment(n, m);
    const auto r3 = r.segment(n + m, m);
    const auto r4 = r.segment(n + 2 * m, m);
    const auto r5 = r.tail(m);
    Vector out(n + 3 * m);
    out.head(n) = (*g) * r1 - (*b) * r2;
    out.segment(n, m) = (*bt) * r1 + r2 - r3;
    out.segment(n + m, m) = ms * r2 + w->cwiseProduct(r4) + r5;
    out.tail(m) = r3 + lambda->cwiseProduct(r4);
    return out;
  };
  return op;
}

namespace {

void require_interior_blocks(const ResidualBlocks& u) {
  require(all_positive(u.b) && all_positive(u.c) && all_positive(u.d),
          ErrorCode::BoundaryViolation, "potential: blocks b, c, d must be strictly positive");
}

double log_sum(const Vector& v) { return v.array().log().sum(); }

}  // namespace

double potential_value(const ResidualBlocks& u, double eta) {
  require_interior_blocks(u);
  const double tau =
      u.a.squaredNorm() + u.b.squaredNorm() + u.c.squaredNorm() + u.d.squaredNorm();
  require(tau > 0.0, ErrorCode::InvalidArgument, "potential: zero residual");
  return eta * std::log(tau) - log_sum(u.b) - log_sum(u.c) - log_sum(u.d);
}

ResidualBlocks potential_gradient(const ResidualBlocks& u, double eta) {
  require_interior_blocks(u);
  const double tau =
      u.a.squaredNorm() + u.b.squaredNorm() + u.c.squaredNorm() + u.d.squaredNorm();
  require(tau > 0.0, ErrorCode::InvalidArgument, "potential: zero residual");
  const double s = 2.0 * eta / tau;
  ResidualBlocks g;
  g.a = s * u.a;
  g.b = s * u.b - u.b.cwiseInverse();
  g.c = s * u.c - u.c.cwiseInverse();
  g.d = s * u.d - u.d.cwiseInverse();
  return g;
}

double merit_value(const CprasState& z, const SnlInstance& inst, double eta,
                   const ResidualForm& form) {
  return potential_value(residual_h_delta(z, inst, form), eta);
}

Vector merit_gradient(const CprasState& z, const SnlInstance& inst, double eta,
                      const ResidualForm& form) {
  const ResidualBlocks h = residual_h_delta(z, inst, form);
  return jacobian_operator(z, inst, form).apply_transpose(potential_gradient(h, eta).stacked());
}

Direction newton_direction(const CprasState& z, const SnlInstance& inst, double beta,
                           const CprasParams& params, bool drop_multiplier_rows) {
  const Index m = inst.m();
  ResidualBlocks target = residual_h_delta(z, inst, params.form);
  const double centering = m > 0 ? beta * target.b.mean() : 0.0;
  target.b.array() -= centering;
  const Vector rhs = -target.stacked();
  LinearOperator jac = jacobian_operator(z, inst, params.form);
  Vector r = rhs;
  if (drop_multiplier_rows) {
    const Index keep = jac.rows - m;
    const LinearOperator full = jac;
    jac.rows = keep;
    jac.apply = [full, keep](const Vector& v) -> Vector { return full.apply(v).head(keep); };
    jac.apply_transpose = [full, keep, m](const Vector& u) -> Vector {
      Vector e = Vector::Zero(keep + m);
      e.head(keep) = u;
      return full.apply_transpose(e);
    };
    r = rhs.head(keep);
  }
  LsqrResult ls;
  try {
    ls = lsqr_least_squares(jac, r, params.lsqr);
  } catch (const Error& e) {
    fail(ErrorCode::NumericalBreakdown, std::string("newton direction: ") + e.what());
  }
  return {std::move(ls.x), ls.iterations, ls.converged};
}

StepResult line_search(const CprasState& z, const Vector& d, const SnlInstance& inst,
                       const CprasParams& params) {
  const Index n = inst.n();
  const Index m = inst.m();
  require(d.size() == n + 3 * m, ErrorCode::DimensionMismatch, "line search: direction length");
  const double eta = params.eta_for(n, m);
  const ResidualBlocks h = residual_h_delta(z, inst, params.form);
  require(is_interior(z, h), ErrorCode::BoundaryViolation, "line search: start is not interior");

  StepResult step;
  step.psi = potential_value(h, eta);
  step.grad_dot_d =
      jacobian_operator(z, inst, params.form).apply_transpose(potential_gradient(h, eta).stacked()).dot(d);
  require(step.grad_dot_d < 0.0, ErrorCode::InvalidArgument,
          "line search: direction is not a descent direction (grad psi . d = " +
              std::to_string(step.grad_dot_d) + ")");

  const Vector base = stack_state(z);
  double alpha = 1.0;
  for (int bt = 0; bt <= params.max_backtracks; ++bt, alpha *= 0.5) {
    const CprasState trial = unstack_state(base + alpha * d, n, m, z.delta);
    if (!all_positive(trial.lambda) || !all_positive(trial.w)) continue;
    const ResidualBlocks ht = residual_h_delta(trial, inst, params.form);
    if (!is_interior(trial, ht)) continue;
    const double psi_t = potential_value(ht, eta);
    if (std::isfinite(psi_t) && psi_t <= step.psi + params.gamma1 * alpha * step.grad_dot_d) {
      step.alpha = alpha;
      step.backtracks = bt;
      step.psi_new = psi_t;
      return step;
    }
  }
  fail(ErrorCode::LineSearchFailure, "line search: no acceptable step after " +
                                         std::to_string(params.max_backtracks) + " backtracks");
}

SolveReport solve(const SnlInstance& inst, const CprasParams& params,
                  const std::optional<CprasState>& initial) {
  inst.validate();
  const Index n = inst.n();
  const Index m = inst.m();
  params.validate(n, m);
  const double eta = params.eta_for(n, m);

  SolveReport report;
  report.solver = "cpras";
  CprasState z = initial ? *initial : initial_state(inst, params);
  check_state(z, inst);

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
    if (inst.truth) report.rmsd = rmsd(z.x, inst);
    log::info("cpras: ", to_string(status), " after ", report.iterations, " iterations, |Gamma|^2 = ",
              report.final_gamma_sq);
    return report;
  };

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.iteration = k;
    rec.delta = z.delta;
    rec.gamma_sq = snl_gamma(inst, z.x, z.sigma).squaredNorm();
    if (k == 0) report.initial_gamma_sq = rec.gamma_sq;
    report.final_gamma_sq = rec.gamma_sq;
    report.iterations = k;

    ResidualBlocks h = residual_h_delta(z, inst, params.form);
    if (!std::isfinite(rec.gamma_sq) || !is_interior(z, h)) {
      rec.elapsed_s = elapsed();
      report.trace.push_back(rec);
      return finish(SolveStatus::NumericalBreakdown,
                    std::isfinite(rec.gamma_sq) ? "iterate left the interior" : "non-finite residual");
    }
    rec.psi = potential_value(h, eta);
    report.max_residual_norm = std::max(report.max_residual_norm, h.stacked().norm());
    report.max_iterate_norm = std::max(report.max_iterate_norm, stack_state(z).norm());

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

    Direction dir;
    StepResult step;
    try {
      dir = newton_direction(z, inst, params.beta, params);
      rec.lsqr_iters = dir.lsqr_iters;
      if (params.square_fallback && merit_gradient(z, inst, eta, params.form).dot(dir.d) >= 0.0) {
        dir = newton_direction(z, inst, params.beta, params, true);
        rec.lsqr_iters += dir.lsqr_iters;
        rec.fallback = true;
        ++report.fallback_directions;
        log::debug("cpras it ", k, ": least-squares step is not descent, using square system");
      }
      step = line_search(z, dir.d, inst, params);
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

    const CprasState next =
        unstack_state(stack_state(z) + step.alpha * dir.d, n, m, z.delta);
    z = next;
    z.delta = std::max(params.gamma2 * z.delta, params.delta_floor);
    rec.elapsed_s = elapsed();
    log::debug("cpras it ", k, ": |Gamma|^2=", rec.gamma_sq, " psi=", rec.psi, " alpha=", rec.alpha,
               " lsqr=", rec.lsqr_iters, " gd=", rec.grad_dot_d);
    report.trace.push_back(rec);
  }
}

}  // namespace cando
