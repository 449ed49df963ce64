#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cando/canonical.hpp"
#include "cando/numerics.hpp"

namespace cando {

struct SensorEdge {
  int i = 0;
  int j = 0;
  double dist = 0.0;
  bool operator==(const SensorEdge&) const = default;
};

struct AnchorEdge {
  int i = 0;
  int k = 0;
  double dist = 0.0;
  bool operator==(const AnchorEdge&) const = default;
};

struct GeneratorConfig {
  int n_sensors = 1;
  int dim = 2;
  double radio_range = 0.5;
  std::uint64_t seed = 1;
  double noise_factor = 0.0;
  // Cap on sensor-sensor neighbors sampled per sensor; nullopt keeps all.
  std::optional<int> max_degree;

  void validate() const;
  bool operator==(const GeneratorConfig&) const = default;
};

// Default sampled-neighbor cap for the benchmark protocol: 17 in 2D, 23 in 3D.
int default_max_degree(int dim);

// Sensor network: N sensors in R^dim, fixed anchors, measured distances.
// Sigma layout everywhere: sensor edges first, then anchor edges, both in
// lexicographic order.
struct SnlInstance {
  int dim = 2;
  int n_sensors = 0;
  std::vector<Vector> anchors;
  std::vector<SensorEdge> edges_h;
  std::vector<AnchorEdge> edges_e;
  std::optional<std::vector<Vector>> truth;
  std::optional<GeneratorConfig> generator;

  Index n() const { return static_cast<Index>(n_sensors) * dim; }
  Index m() const { return static_cast<Index>(edges_h.size() + edges_e.size()); }
  Index mh() const { return static_cast<Index>(edges_h.size()); }

  // Index ranges, strict ordering, positive distances, no duplicates.
  void validate() const;
  bool operator==(const SnlInstance&) const = default;
};

SnlInstance generate_instance(const GeneratorConfig& cfg);

// max(1 + alpha * nu, 0.1)
double noise_factor(double alpha, double nu);

// Multiplies every distance by noise_factor(alpha, nu) with nu drawn from
// `normal` once per edge (sensor edges first). Distances are recomputed from
// the stored truth.
SnlInstance apply_noise(const SnlInstance& inst, double alpha,
                        const std::function<double()>& normal);
SnlInstance apply_noise(const SnlInstance& inst, double alpha, std::uint64_t seed);

// Positions stacked sensor by sensor: x[i*dim + d].
Vector truth_vector(const SnlInstance& inst);

double snl_primal(const SnlInstance& inst, const Vector& x);

// Squared measured distances in sigma order (the linear coefficient of V*).
Vector squared_distances(const SnlInstance& inst);

// Lambda(x): squared current edge lengths in sigma order.
Vector edge_lengths_sq(const SnlInstance& inst, const Vector& x);

SparseMatrix assemble_g(const SnlInstance& inst, const Vector& sigma);
Vector assemble_f(const SnlInstance& inst, const Vector& sigma);
// n x m mixed second derivative of Xi.
SparseMatrix cross_hessian(const SnlInstance& inst, const Vector& x);

struct VStarValue {
  double value = 0.0;
  Vector gradient;
};
VStarValue vstar_value_grad(const SnlInstance& inst, const Vector& sigma);

// Xi for the sensor problem, evaluated edge by edge.
double snl_xi(const SnlInstance& inst, const Vector& x, const Vector& sigma);

// (G x - F ; sigma + d^2 - Lambda(x)) through the sparse assemblies.
Vector snl_gamma(const SnlInstance& inst, const Vector& x, const Vector& sigma);

double rmsd(const Vector& x, const SnlInstance& inst);

constexpr Index kCanonicalSizeGuard = 64;

// Dense canonical form; the anchor constants live in the linear term of V*.
QuadraticCanonicalProblem to_canonical(const SnlInstance& inst,
                                       Index size_guard = kCanonicalSizeGuard);

inline constexpr const char* kInstanceFormatVersion = "cando-snl-instance/1";

std::string instance_to_json(const SnlInstance& inst);
SnlInstance instance_from_json(const std::string& text);
void save_instance(const SnlInstance& inst, const std::string& path);
SnlInstance load_instance(const std::string& path);

// CSV: index,x,y[,z]
void write_positions_csv(const std::string& path, const Vector& x, int dim);

}  // namespace cando
