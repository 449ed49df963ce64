#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "cando/canonical.hpp"
#include "cando/error.hpp"
#include "cando/snl.hpp"
#include "support.hpp"

using namespace cando;
using cando::testing::random_vector;

namespace {

// n = 2, m = 1 problem with a user-chosen C_1, b_1.
QuadraticCanonicalProblem tiny(const Matrix& a, const Matrix& c1, const Vector& b1, const Vector& c) {
  QuadraticCanonicalProblem p;
  p.n = a.rows();
  p.m = 1;
  p.A = a;
  p.c = c;
  p.C = {c1};
  p.b = {b1};
  QuadraticConjugate conj{Vector::Zero(1)};
  p.vstar = conj;
  p.v_of_xi = [conj](const Vector& xi) { return conj.primal(xi); };
  return p;
}

// Sensor on the line with one anchor: Xi = sigma x^2 - 2 a sigma x - sigma^2/2 - (e^2 - a^2) sigma.
QuadraticCanonicalProblem one_anchor(double anchor, double e) {
  return to_canonical(cando::testing::line_one_anchor(anchor, e));
}

}  // namespace

TEST_CASE("lambda evaluation") {
  const Matrix z = Matrix::Zero(2, 2);
  auto p = tiny(z, 2.0 * Matrix::Identity(2, 2), Vector::Zero(2), Vector::Zero(2));
  CHECK(lambda_eval(p, Vector::Ones(2))[0] == doctest::Approx(2.0));
  CHECK(lambda_eval(p, Vector::Zero(2))[0] == 0.0);
  p = tiny(z, z, (Vector(2) << 1.0, 0.0).finished(), Vector::Zero(2));
  CHECK(lambda_eval(p, (Vector(2) << 3.0, 7.0).finished())[0] == doctest::Approx(-3.0));
  CHECK_THROWS_AS(lambda_eval(p, Vector::Ones(3)), Error);
}

TEST_CASE("G and F assembly") {
  Matrix c1 = Matrix::Zero(2, 2);
  c1.diagonal() << 1.0, -1.0;
  const auto p = tiny(Matrix::Identity(2, 2), c1, (Vector(2) << 2.0, 0.0).finished(), Vector::Zero(2));
  CHECK((g_of_sigma(p, Vector::Zero(1)) - p.A).norm() == 0.0);
  Matrix expect = Matrix::Zero(2, 2);
  expect.diagonal() << 3.0, -1.0;
  CHECK((g_of_sigma(p, Vector::Constant(1, 2.0)) - expect).norm() < 1e-15);
  CHECK((f_of_sigma(p, Vector::Zero(1)) - p.c).norm() == 0.0);
  CHECK((f_of_sigma(p, Vector::Constant(1, 3.0)) - (Vector(2) << 6.0, 0.0).finished()).norm() < 1e-15);
  CHECK_THROWS_AS(g_of_sigma(p, Vector::Ones(2)), Error);
  CHECK_THROWS_AS(f_of_sigma(p, Vector::Ones(2)), Error);

  const auto q = tiny(Matrix::Identity(2, 2), c1, Vector::Zero(2), (Vector(2) << 1.0, 4.0).finished());
  for (double s : {-2.0, 0.0, 5.0}) CHECK((f_of_sigma(q, Vector::Constant(1, s)) - q.c).norm() == 0.0);
}

TEST_CASE("G and F are affine in sigma") {
  std::mt19937_64 rng(21);
  const auto p = to_canonical(cando::testing::small_instance(3, 4));
  for (int k = 0; k < 20; ++k) {
    const Vector s1 = random_vector(rng, p.m), s2 = random_vector(rng, p.m);
    const double t = random_vector(rng, 1, 0.0, 1.0)[0];
    const Vector mix = t * s1 + (1 - t) * s2;
    CHECK((g_of_sigma(p, mix) - (t * g_of_sigma(p, s1) + (1 - t) * g_of_sigma(p, s2))).norm() < 1e-12);
    CHECK((f_of_sigma(p, mix) - (t * f_of_sigma(p, s1) + (1 - t) * f_of_sigma(p, s2))).norm() < 1e-12);
    CHECK((g_of_sigma(p, s1 + s2) - (g_of_sigma(p, s1) + g_of_sigma(p, s2) - p.A)).norm() < 1e-12);
  }
}

TEST_CASE("xi value on the one anchor reduction") {
  const auto p = one_anchor(0.0, 0.5);
  CHECK(xi_value(p, Vector::Ones(1), Vector::Constant(1, 2.0)) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(xi_value(p, Vector::Zero(1), Vector::Zero(1)) == 0.0);
}

TEST_CASE("Fenchel-Young consistency: Xi at sigma = grad V(Lambda(x)) equals P") {
  std::mt19937_64 rng(2);
  const auto inst = cando::testing::small_instance(3, 7);
  const auto p = to_canonical(inst);
  for (int k = 0; k < 50; ++k) {
    const Vector x = random_vector(rng, p.n, 0.0, 1.0);
    // grad V(xi) = xi - q with q = grad V*(0).
    const Vector lam = lambda_eval(p, x);
    const Vector sigma = lam - p.vstar(Vector::Zero(p.m)).gradient;
    CHECK(xi_value(p, x, sigma) == doctest::Approx(primal_value(p, x)).epsilon(1e-10));
  }
}

TEST_CASE("Fenchel-Young equality for the quadratic conjugate") {
  std::mt19937_64 rng(8);
  QuadraticConjugate conj{random_vector(rng, 5)};
  for (int k = 0; k < 100; ++k) {
    const Vector xi = random_vector(rng, 5, -3.0, 3.0);
    const Vector sigma = conj.primal_gradient(xi);
    CHECK(std::abs(xi.dot(sigma) - conj.primal(xi) - conj(sigma).value) < 1e-10);
  }
}

TEST_CASE("gamma residual: two-anchor line at the truth is stationary") {
  const auto p = to_canonical(cando::testing::line_two_anchor());
  const Vector g = gamma_residual(p, Vector::Constant(1, 0.3), Vector::Zero(2));
  CHECK(g.norm() < 1e-14);
}

TEST_CASE("gamma residual: zero problem") {
  QuadraticCanonicalProblem p;
  p.n = 2;
  p.m = 1;
  p.A = Matrix::Zero(2, 2);
  p.c = Vector::Zero(2);
  p.C = {Matrix::Identity(2, 2)};
  p.b = {Vector::Zero(2)};
  p.vstar = QuadraticConjugate{Vector::Zero(1)};
  CHECK(gamma_residual(p, Vector::Zero(2), Vector::Zero(1)).norm() == 0.0);
}

TEST_CASE("gamma residual matches finite differences of Xi") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = to_canonical(cando::testing::small_instance(2 + trial % 3, trial + 1));
    const Vector x = random_vector(rng, p.n, 0.0, 1.0);
    const Vector s = random_vector(rng, p.m);
    Vector z(p.n + p.m);
    z << x, s;
    const auto xi = [&](const Vector& v) {
      return Vector::Constant(1, xi_value(p, v.head(p.n), v.tail(p.m)));
    };
    const Matrix fd = finite_difference_jacobian(xi, z, default_fd_step(z));
    Vector expect(p.n + p.m);
    expect << fd.row(0).head(p.n).transpose(), -fd.row(0).tail(p.m).transpose();
    const Vector g = gamma_residual(p, x, s);
    CHECK((g - expect).norm() <= 1e-6 * std::max(1.0, expect.norm()));
  }
}

TEST_CASE("primal value examples") {
  const auto p = one_anchor(0.0, 0.5);
  CHECK(primal_value(p, Vector::Ones(1)) == doctest::Approx(0.28125).epsilon(1e-14));
  const auto inst = cando::testing::small_instance(4, 3);
  const auto q = to_canonical(inst);
  CHECK(std::abs(primal_value(q, truth_vector(inst))) < 1e-20);
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) CHECK(primal_value(q, random_vector(rng, q.n)) >= 0.0);
  QuadraticCanonicalProblem bare = q;
  bare.v_of_xi = nullptr;
  CHECK_THROWS_AS(primal_value(bare, truth_vector(inst)), Error);
}

TEST_CASE("dual value") {
  const auto inst = cando::testing::small_instance(3, 2);
  const auto p = to_canonical(inst);
  try {
    dual_value(p, Vector::Zero(p.m));
    FAIL("expected SingularG");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SingularG);
  }
  // Anchor at 1, e = 0.5 with the V* linear term q = 0.25 (no anchor constant):
  // G = 2 sigma, F = 2 sigma, so P^d = -sigma - sigma^2 / 2 - 0.25 sigma.
  QuadraticCanonicalProblem h;
  h.n = 1;
  h.m = 1;
  h.A = Matrix::Zero(1, 1);
  h.c = Vector::Zero(1);
  h.C = {Matrix::Constant(1, 1, 2.0)};
  h.b = {Vector::Constant(1, 2.0)};
  h.vstar = QuadraticConjugate{Vector::Constant(1, 0.25)};
  CHECK(dual_value(h, Vector::Constant(1, 1.0)) == doctest::Approx(-1.75).epsilon(1e-14));
}

TEST_CASE("dual value is concave on the interior of the PSD region") {
  std::mt19937_64 rng(6);
  const auto p = to_canonical(cando::testing::small_instance(3, 5));
  for (int k = 0; k < 50; ++k) {
    const Vector s1 = random_vector(rng, p.m, 0.2, 3.0);
    const Vector s2 = random_vector(rng, p.m, 0.2, 3.0);
    const double mid = dual_value(p, 0.5 * (s1 + s2));
    CHECK(mid >= 0.5 * (dual_value(p, s1) + dual_value(p, s2)) - 1e-10);
  }
}

TEST_CASE("primal recovery") {
  const auto p = one_anchor(1.0, 0.5);
  for (double s : {0.1, 1.0, 7.0}) {
    CHECK(recover_primal(p, Vector::Constant(1, s))[0] == doctest::Approx(1.0).epsilon(1e-14));
  }
  QuadraticCanonicalProblem id;
  id.n = 2;
  id.m = 1;
  id.A = Matrix::Identity(2, 2);
  id.c = (Vector(2) << 0.4, -2.0).finished();
  id.C = {Matrix::Zero(2, 2)};
  id.b = {Vector::Zero(2)};
  id.vstar = QuadraticConjugate{Vector::Zero(1)};
  CHECK((recover_primal(id, Vector::Zero(1)) - id.c).norm() < 1e-15);

  std::mt19937_64 rng(12);
  const auto q = to_canonical(cando::testing::small_instance(3, 9));
  const Vector s = random_vector(rng, q.m, 0.5, 2.0);
  const Vector x = recover_primal(q, s);
  const Vector f = f_of_sigma(q, s);
  CHECK((g_of_sigma(q, s) * x - f).norm() <= 1e-10 * (1 + f.norm()));
  CHECK_THROWS_AS(recover_primal(q, Vector::Zero(q.m)), Error);
}

TEST_CASE("zero duality gap at a hand-constructed critical point") {
  // P(x) = 1/2 (x^2 - q)^2 + x^2 / 2 - x / 2, critical point placed at
  // x = 0.25, sigma = 0.5 by the choice of q.
  QuadraticCanonicalProblem h;
  h.n = 1;
  h.m = 1;
  h.A = Matrix::Constant(1, 1, 1.0);
  h.c = Vector::Constant(1, 0.5);
  h.C = {Matrix::Constant(1, 1, 2.0)};
  h.b = {Vector::Zero(1)};
  const double x = 0.25, sigma = 0.5, q = x * x - sigma;
  QuadraticConjugate conj{Vector::Constant(1, q)};
  h.vstar = conj;
  h.v_of_xi = [conj](const Vector& xi) { return conj.primal(xi); };
  const Vector xv = Vector::Constant(1, x), sv = Vector::Constant(1, sigma);
  CHECK(gamma_residual(h, xv, sv).norm() < 1e-15);
  const double pv = primal_value(h, xv);
  CHECK(std::abs(pv - xi_value(h, xv, sv)) < 1e-8);
  CHECK(std::abs(pv - dual_value(h, sv)) < 1e-8);
  const auto cert = certify_global(h, xv, sv, 1e-10);
  CHECK(cert.stationary);
  CHECK(cert.cone);
  REQUIRE(cert.gap);
  CHECK(*cert.gap < 1e-12);
}

TEST_CASE("global certificate") {
  const auto p = to_canonical(cando::testing::line_two_anchor());
  const auto good = certify_global(p, Vector::Constant(1, 0.3), Vector::Zero(2), 1e-10);
  CHECK(good.stationary);
  CHECK(good.cone);
  REQUIRE(good.gap);
  CHECK(*good.gap <= 1e-12);
  const auto generic = certify_global(p, Vector::Constant(1, 0.8), Vector::Constant(2, 0.4), 1e-10);
  CHECK_FALSE(generic.stationary);
  const auto indefinite = certify_global(p, Vector::Constant(1, 0.3), Vector::Constant(2, -1.0), 1e-10);
  CHECK_FALSE(indefinite.cone);
}

TEST_CASE("problem validation") {
  QuadraticCanonicalProblem p;
  p.n = 2;
  p.m = 1;
  p.A = Matrix::Zero(2, 2);
  p.c = Vector::Zero(2);
  Matrix c1 = Matrix::Zero(2, 2);
  c1(0, 1) = 1.0;
  p.C = {c1};
  p.b = {Vector::Zero(2)};
  p.vstar = QuadraticConjugate{Vector::Zero(1)};
  CHECK_THROWS_AS(p.validate(), Error);
}
