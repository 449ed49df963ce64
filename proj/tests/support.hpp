#pragma once

#include <cmath>
#include <random>

#include "cando/cpras.hpp"
#include "cando/snl.hpp"

namespace cando::testing {

// 1D line with anchors at 0 and 1 and a single sensor at 0.3; exact distances.
inline SnlInstance line_two_anchor() {
  SnlInstance inst;
  inst.dim = 1;
  inst.n_sensors = 1;
  inst.anchors = {Vector::Constant(1, 0.0), Vector::Constant(1, 1.0)};
  inst.edges_e = {{0, 0, 0.3}, {0, 1, 0.7}};
  inst.truth = std::vector<Vector>{Vector::Constant(1, 0.3)};
  return inst;
}

// One sensor on the line, one anchor at `anchor`, measured distance e.
inline SnlInstance line_one_anchor(double anchor, double e) {
  SnlInstance inst;
  inst.dim = 1;
  inst.n_sensors = 1;
  inst.anchors = {Vector::Constant(1, anchor)};
  inst.edges_e = {{0, 0, e}};
  return inst;
}

// Small 2D instance with every pair in range.
inline SnlInstance small_instance(int n_sensors, std::uint64_t seed, double rho = 1.5,
                                  int dim = 2) {
  GeneratorConfig cfg;
  cfg.n_sensors = n_sensors;
  cfg.dim = dim;
  cfg.radio_range = rho;
  cfg.seed = seed;
  return generate_instance(cfg);
}

inline Vector random_vector(std::mt19937_64& rng, Index n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline Matrix random_symmetric(std::mt19937_64& rng, Index n) {
  const Vector v = random_vector(rng, n * n);
  const Matrix a = v.reshaped(n, n);
  return 0.5 * (a + a.transpose());
}

inline Matrix random_spd(std::mt19937_64& rng, Index n, double shift = 0.5) {
  const Vector v = random_vector(rng, n * n);
  const Matrix a = v.reshaped(n, n);
  return a * a.transpose() + shift * Matrix::Identity(n, n);
}

// Interior CPRAS state: lambda, w positive with w > sigma + delta + margin.
inline CprasState random_interior_state(std::mt19937_64& rng, const SnlInstance& inst) {
  const Index m = inst.m();
  CprasState z;
  z.x = random_vector(rng, inst.n(), 0.0, 1.0);
  z.sigma = random_vector(rng, m, -0.05, 2.0);
  z.lambda = random_vector(rng, m, 0.1, 2.0);
  z.delta = std::uniform_real_distribution<double>(0.01, 0.5)(rng);
  z.w = z.sigma + Vector::Constant(m, z.delta) + random_vector(rng, m, 0.1, 2.0);
  return z;
}

inline double rel_error(const Matrix& a, const Matrix& b) {
  return (a - b).norm() / std::max(1.0, b.norm());
}

}  // namespace cando::testing
