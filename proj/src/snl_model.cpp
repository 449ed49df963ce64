#include "cando/snl.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <string>
#include <utility>

#include "cando/error.hpp"

namespace cando {

void GeneratorConfig::validate() const {
  require(n_sensors >= 1, ErrorCode::InvalidArgument, "generator: need at least one sensor");
  require(dim == 2 || dim == 3, ErrorCode::InvalidArgument, "generator: dim must be 2 or 3");
  require(radio_range > 0.0 && std::isfinite(radio_range), ErrorCode::InvalidArgument,
          "generator: radio range must be positive");
  require(noise_factor >= 0.0 && std::isfinite(noise_factor), ErrorCode::InvalidArgument,
          "generator: noise factor must be non-negative");
  require(!max_degree || *max_degree >= 1, ErrorCode::InvalidArgument,
          "generator: max_degree must be at least 1");
}

int default_max_degree(int dim) { return dim == 3 ? 23 : 17; }

void SnlInstance::validate() const {
  require(dim >= 1 && dim <= 3, ErrorCode::InvalidArgument, "instance: dim must be 1, 2 or 3");
  require(n_sensors >= 1, ErrorCode::InvalidArgument, "instance: need at least one sensor");
  for (const auto& a : anchors) {
    require(a.size() == dim, ErrorCode::DimensionMismatch, "instance: anchor has wrong dimension");
  }
  const int n_anchor = static_cast<int>(anchors.size());
  for (std::size_t t = 0; t < edges_h.size(); ++t) {
    const auto& e = edges_h[t];
    require(0 <= e.i && e.i < e.j && e.j < n_sensors, ErrorCode::InvalidArgument,
            "instance: sensor edge indices out of range or not i < j");
    require(e.dist > 0.0 && std::isfinite(e.dist), ErrorCode::InvalidArgument,
            "instance: sensor edge distance must be positive");
    if (t > 0) {
      const auto& p = edges_h[t - 1];
      require(std::pair(p.i, p.j) != std::pair(e.i, e.j), ErrorCode::InvalidArgument,
              "instance: duplicate sensor edge (" + std::to_string(e.i) + "," +
                  std::to_string(e.j) + ")");
      require(std::pair(p.i, p.j) < std::pair(e.i, e.j), ErrorCode::InvalidArgument,
              "instance: sensor edges are not in lexicographic order");
    }
  }
  for (std::size_t t = 0; t < edges_e.size(); ++t) {
    const auto& e = edges_e[t];
    require(0 <= e.i && e.i < n_sensors && 0 <= e.k && e.k < n_anchor,
            ErrorCode::InvalidArgument, "instance: anchor edge indices out of range");
    require(e.dist > 0.0 && std::isfinite(e.dist), ErrorCode::InvalidArgument,
            "instance: anchor edge distance must be positive");
    if (t > 0) {
      const auto& p = edges_e[t - 1];
      require(std::pair(p.i, p.k) != std::pair(e.i, e.k), ErrorCode::InvalidArgument,
              "instance: duplicate anchor edge (" + std::to_string(e.i) + "," +
                  std::to_string(e.k) + ")");
      require(std::pair(p.i, p.k) < std::pair(e.i, e.k), ErrorCode::InvalidArgument,
              "instance: anchor edges are not in lexicographic order");
    }
  }
  if (truth) {
    require(static_cast<int>(truth->size()) == n_sensors, ErrorCode::DimensionMismatch,
            "instance: truth must list every sensor");
    for (const auto& p : *truth) {
      require(p.size() == dim, ErrorCode::DimensionMismatch,
              "instance: truth position has wrong dimension");
    }
  }
}

namespace {

constexpr std::uint64_t kNoiseSeedSalt = 0x9E3779B97F4A7C15ULL;

std::vector<Vector> corner_anchors(int dim) {
  std::vector<Vector> out;
  for (int c = 0; c < (1 << dim); ++c) {
    Vector a(dim);
    for (int d = 0; d < dim; ++d) a[d] = static_cast<double>((c >> d) & 1);
    out.push_back(a);
  }
  return out;
}

void check_n(const SnlInstance& inst, const Vector& x) {
  require(x.size() == inst.n(), ErrorCode::DimensionMismatch,
          "snl: x has length " + std::to_string(x.size()) + ", expected " +
              std::to_string(inst.n()));
}

void check_m(const SnlInstance& inst, const Vector& sigma) {
  require(sigma.size() == inst.m(), ErrorCode::DimensionMismatch,
          "snl: sigma has length " + std::to_string(sigma.size()) + ", expected " +
              std::to_string(inst.m()));
}

}  // namespace

SnlInstance generate_instance(const GeneratorConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SnlInstance inst;
  inst.dim = cfg.dim;
  inst.n_sensors = cfg.n_sensors;
  inst.anchors = corner_anchors(cfg.dim);
  inst.generator = cfg;

  std::vector<Vector> pos(cfg.n_sensors, Vector(cfg.dim));
  for (auto& p : pos) {
    for (int d = 0; d < cfg.dim; ++d) p[d] = unit(rng);
  }

  std::set<std::pair<int, int>> pairs;
  std::vector<int> nbrs;
  for (int i = 0; i < cfg.n_sensors; ++i) {
    nbrs.clear();
    for (int j = 0; j < cfg.n_sensors; ++j) {
      if (j != i && (pos[i] - pos[j]).norm() <= cfg.radio_range) nbrs.push_back(j);
    }
    std::size_t keep = nbrs.size();
    if (cfg.max_degree && nbrs.size() > static_cast<std::size_t>(*cfg.max_degree)) {
      keep = static_cast<std::size_t>(*cfg.max_degree);
      // Partial Fisher-Yates: the first `keep` slots become a uniform sample.
      for (std::size_t s = 0; s < keep; ++s) {
        std::uniform_int_distribution<std::size_t> pick(s, nbrs.size() - 1);
        std::swap(nbrs[s], nbrs[pick(rng)]);
      }
    }
    for (std::size_t s = 0; s < keep; ++s) {
      pairs.emplace(std::min(i, nbrs[s]), std::max(i, nbrs[s]));
    }
  }
  for (const auto& [i, j] : pairs) {
    inst.edges_h.push_back({i, j, (pos[i] - pos[j]).norm()});
  }
  for (int i = 0; i < cfg.n_sensors; ++i) {
    for (int k = 0; k < static_cast<int>(inst.anchors.size()); ++k) {
      const double d = (pos[i] - inst.anchors[k]).norm();
      if (d <= cfg.radio_range) inst.edges_e.push_back({i, k, d});
    }
  }
  inst.truth = std::move(pos);

  if (cfg.noise_factor > 0.0) {
    inst = apply_noise(inst, cfg.noise_factor, cfg.seed ^ kNoiseSeedSalt);
  }
  return inst;
}

double noise_factor(double alpha, double nu) { return std::max(1.0 + alpha * nu, 0.1); }

SnlInstance apply_noise(const SnlInstance& inst, double alpha,
                        const std::function<double()>& normal) {
  require(inst.truth.has_value(), ErrorCode::MissingTruth,
          "apply_noise: instance has no ground truth");
  require(alpha >= 0.0, ErrorCode::InvalidArgument, "apply_noise: alpha must be non-negative");
  SnlInstance out = inst;
  if (alpha == 0.0) return out;
  const auto& truth = *inst.truth;
  for (auto& e : out.edges_h) {
    e.dist = noise_factor(alpha, normal()) * (truth[e.i] - truth[e.j]).norm();
  }
  for (auto& e : out.edges_e) {
    e.dist = noise_factor(alpha, normal()) * (truth[e.i] - inst.anchors[e.k]).norm();
  }
  return out;
}

SnlInstance apply_noise(const SnlInstance& inst, double alpha, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  return apply_noise(inst, alpha, [&] { return gauss(rng); });
}

Vector truth_vector(const SnlInstance& inst) {
  require(inst.truth.has_value(), ErrorCode::MissingTruth, "instance has no ground truth");
  Vector x(inst.n());
  for (int i = 0; i < inst.n_sensors; ++i) x.segment(i * inst.dim, inst.dim) = (*inst.truth)[i];
  return x;
}

Vector squared_distances(const SnlInstance& inst) {
  Vector d2(inst.m());
  Index t = 0;
  for (const auto& e : inst.edges_h) d2[t++] = e.dist * e.dist;
  for (const auto& e : inst.edges_e) d2[t++] = e.dist * e.dist;
  return d2;
}

Vector edge_lengths_sq(const SnlInstance& inst, const Vector& x) {
  check_n(inst, x);
  const int dim = inst.dim;
  Vector out(inst.m());
  Index t = 0;
  for (const auto& e : inst.edges_h) {
    out[t++] = (x.segment(e.i * dim, dim) - x.segment(e.j * dim, dim)).squaredNorm();
  }
  for (const auto& e : inst.edges_e) {
    out[t++] = (x.segment(e.i * dim, dim) - inst.anchors[e.k]).squaredNorm();
  }
  return out;
}

double snl_primal(const SnlInstance& inst, const Vector& x) {
  const Vector r = edge_lengths_sq(inst, x) - squared_distances(inst);
  return 0.5 * r.squaredNorm();
}

SparseMatrix assemble_g(const SnlInstance& inst, const Vector& sigma) {
  check_m(inst, sigma);
  const int dim = inst.dim;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(dim) * (inst.n() + 4 * inst.edges_h.size()));
  // Structural zeros on the diagonal keep the pattern independent of sigma.
  for (Index r = 0; r < inst.n(); ++r) trip.emplace_back(r, r, 0.0);
  Index t = 0;
  for (const auto& e : inst.edges_h) {
    const double s = 2.0 * sigma[t++];
    for (int d = 0; d < dim; ++d) {
      const Index ri = e.i * dim + d;
      const Index rj = e.j * dim + d;
      trip.emplace_back(ri, ri, s);
      trip.emplace_back(rj, rj, s);
      trip.emplace_back(ri, rj, -s);
      trip.emplace_back(rj, ri, -s);
    }
  }
  for (const auto& e : inst.edges_e) {
    const double s = 2.0 * sigma[t++];
    for (int d = 0; d < dim; ++d) {
      const Index ri = e.i * dim + d;
      trip.emplace_back(ri, ri, s);
    }
  }
  SparseMatrix g(inst.n(), inst.n());
  g.setFromTriplets(trip.begin(), trip.end());
  return g;
}

Vector assemble_f(const SnlInstance& inst, const Vector& sigma) {
  require(sigma.size() == inst.m() || sigma.size() == static_cast<Index>(inst.edges_e.size()),
          ErrorCode::DimensionMismatch, "assemble_f: sigma must be full or anchor part");
  const Index offset = sigma.size() == inst.m() ? inst.mh() : 0;
  const int dim = inst.dim;
  Vector f = Vector::Zero(inst.n());
  for (std::size_t t = 0; t < inst.edges_e.size(); ++t) {
    const auto& e = inst.edges_e[t];
    f.segment(e.i * dim, dim) += 2.0 * sigma[offset + static_cast<Index>(t)] * inst.anchors[e.k];
  }
  return f;
}

SparseMatrix cross_hessian(const SnlInstance& inst, const Vector& x) {
  check_n(inst, x);
  const int dim = inst.dim;
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(dim) * (2 * inst.edges_h.size() + inst.edges_e.size()));
  Index t = 0;
  for (const auto& e : inst.edges_h) {
    for (int d = 0; d < dim; ++d) {
      const double diff = 2.0 * (x[e.i * dim + d] - x[e.j * dim + d]);
      trip.emplace_back(e.i * dim + d, t, diff);
      trip.emplace_back(e.j * dim + d, t, -diff);
    }
    ++t;
  }
  for (const auto& e : inst.edges_e) {
    for (int d = 0; d < dim; ++d) {
      trip.emplace_back(e.i * dim + d, t, 2.0 * (x[e.i * dim + d] - inst.anchors[e.k][d]));
    }
    ++t;
  }
  SparseMatrix b(inst.n(), inst.m());
  b.setFromTriplets(trip.begin(), trip.end());
  return b;
}

VStarValue vstar_value_grad(const SnlInstance& inst, const Vector& sigma) {
  check_m(inst, sigma);
  const Vector d2 = squared_distances(inst);
  return {0.5 * sigma.squaredNorm() + d2.dot(sigma), sigma + d2};
}

double snl_xi(const SnlInstance& inst, const Vector& x, const Vector& sigma) {
  check_m(inst, sigma);
  return sigma.dot(edge_lengths_sq(inst, x)) - vstar_value_grad(inst, sigma).value;
}

Vector snl_gamma(const SnlInstance& inst, const Vector& x, const Vector& sigma) {
  check_n(inst, x);
  check_m(inst, sigma);
  Vector out(inst.n() + inst.m());
  out.head(inst.n()) = assemble_g(inst, sigma) * x - assemble_f(inst, sigma);
  out.tail(inst.m()) = sigma + squared_distances(inst) - edge_lengths_sq(inst, x);
  return out;
}

double rmsd(const Vector& x, const SnlInstance& inst) {
  const Vector t = truth_vector(inst);
  check_n(inst, x);
  return std::sqrt((x - t).squaredNorm() / inst.n_sensors);
}

QuadraticCanonicalProblem to_canonical(const SnlInstance& inst, Index size_guard) {
  require(inst.n() <= size_guard, ErrorCode::SizeGuard,
          "to_canonical: n = " + std::to_string(inst.n()) + " exceeds the dense size guard " +
              std::to_string(size_guard));
  const Index n = inst.n();
  const int dim = inst.dim;
  QuadraticCanonicalProblem p;
  p.n = n;
  p.m = inst.m();
  p.A = Matrix::Zero(n, n);
  p.c = Vector::Zero(n);
  Vector q = squared_distances(inst);
  Index t = 0;
  for (const auto& e : inst.edges_h) {
    Matrix ck = Matrix::Zero(n, n);
    for (int d = 0; d < dim; ++d) {
      const Index ri = e.i * dim + d;
      const Index rj = e.j * dim + d;
      ck(ri, ri) = 2.0;
      ck(rj, rj) = 2.0;
      ck(ri, rj) = -2.0;
      ck(rj, ri) = -2.0;
    }
    p.C.push_back(std::move(ck));
    p.b.push_back(Vector::Zero(n));
    ++t;
  }
  for (const auto& e : inst.edges_e) {
    Matrix ck = Matrix::Zero(n, n);
    Vector bk = Vector::Zero(n);
    for (int d = 0; d < dim; ++d) {
      const Index ri = e.i * dim + d;
      ck(ri, ri) = 2.0;
      bk[ri] = 2.0 * inst.anchors[e.k][d];
    }
    p.C.push_back(std::move(ck));
    p.b.push_back(std::move(bk));
    q[t] -= inst.anchors[e.k].squaredNorm();
    ++t;
  }
  QuadraticConjugate conj{q};
  p.vstar = conj;
  p.v_of_xi = [conj](const Vector& xi) { return conj.primal(xi); };
  return p;
}

}  // namespace cando
