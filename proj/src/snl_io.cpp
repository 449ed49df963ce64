#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "cando/error.hpp"
#include "cando/snl.hpp"

namespace cando {

using nlohmann::json;

namespace {

json point_json(const Vector& v) {
  json arr = json::array();
  for (Index d = 0; d < v.size(); ++d) arr.push_back(v[d]);
  return arr;
}

Vector point_from(const json& j, int dim, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim) {
    fail(ErrorCode::Parse, std::string("instance file: ") + what + " has wrong dimension");
  }
  Vector v(dim);
  for (int d = 0; d < dim; ++d) v[d] = j.at(d).get<double>();
  return v;
}

}  // namespace

std::string instance_to_json(const SnlInstance& inst) {
  json doc;
  doc["version"] = kInstanceFormatVersion;
  doc["dim"] = inst.dim;
  doc["N"] = inst.n_sensors;
  doc["anchors"] = json::array();
  for (const auto& a : inst.anchors) doc["anchors"].push_back(point_json(a));
  doc["edges_h"] = json::array();
  for (const auto& e : inst.edges_h) doc["edges_h"].push_back(json::array({e.i, e.j, e.dist}));
  doc["edges_e"] = json::array();
  for (const auto& e : inst.edges_e) doc["edges_e"].push_back(json::array({e.i, e.k, e.dist}));
  if (inst.truth) {
    doc["truth"] = json::array();
    for (const auto& p : *inst.truth) doc["truth"].push_back(point_json(p));
  }
  if (inst.generator) {
    const auto& g = *inst.generator;
    doc["generator"] = {{"seed", g.seed},
                        {"rho", g.radio_range},
                        {"alpha", g.noise_factor},
                        {"max_degree", g.max_degree ? json(*g.max_degree) : json(nullptr)}};
  }
  return doc.dump(1) + "\n";
}

SnlInstance instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("instance file: ") + e.what());
  }
  try {
    const std::string version = doc.at("version").get<std::string>();
    require(version == kInstanceFormatVersion, ErrorCode::VersionMismatch,
            "instance file: unsupported version '" + version + "'");
    SnlInstance inst;
    inst.dim = doc.at("dim").get<int>();
    inst.n_sensors = doc.at("N").get<int>();
    require(inst.dim >= 1 && inst.dim <= 3, ErrorCode::Parse, "instance file: bad dim");
    for (const auto& a : doc.at("anchors")) inst.anchors.push_back(point_from(a, inst.dim, "anchor"));
    for (const auto& e : doc.at("edges_h")) {
      require(e.is_array() && e.size() == 3, ErrorCode::Parse, "instance file: bad edges_h entry");
      inst.edges_h.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    }
    for (const auto& e : doc.at("edges_e")) {
      require(e.is_array() && e.size() == 3, ErrorCode::Parse, "instance file: bad edges_e entry");
      inst.edges_e.push_back({e.at(0).get<int>(), e.at(1).get<int>(), e.at(2).get<double>()});
    }
    if (doc.contains("truth") && !doc["truth"].is_null()) {
      std::vector<Vector> truth;
      for (const auto& p : doc["truth"]) truth.push_back(point_from(p, inst.dim, "truth"));
      inst.truth = std::move(truth);
    }
    if (doc.contains("generator") && !doc["generator"].is_null()) {
      const auto& g = doc["generator"];
      GeneratorConfig cfg;
      cfg.n_sensors = inst.n_sensors;
      cfg.dim = inst.dim;
      cfg.seed = g.at("seed").get<std::uint64_t>();
      cfg.radio_range = g.at("rho").get<double>();
      cfg.noise_factor = g.at("alpha").get<double>();
      if (g.contains("max_degree") && !g["max_degree"].is_null()) {
        cfg.max_degree = g["max_degree"].get<int>();
      }
      inst.generator = cfg;
    }
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string("instance file: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::VersionMismatch) throw;
    fail(ErrorCode::Parse, e.what());
  }
}

void save_instance(const SnlInstance& inst, const std::string& path) {
  inst.validate();
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  out << instance_to_json(inst);
  require(static_cast<bool>(out), ErrorCode::Io, "write to '" + path + "' failed");
}

SnlInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorCode::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_json(buf.str());
}

void write_positions_csv(const std::string& path, const Vector& x, int dim) {
  require(dim >= 1 && x.size() % dim == 0, ErrorCode::DimensionMismatch,
          "positions: length is not a multiple of dim");
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path + "' for writing");
  static const char* kAxes[] = {"x", "y", "z"};
  out << "index";
  for (int d = 0; d < dim; ++d) out << ',' << kAxes[d];
  out << '\n';
  char buf[32];
  for (Index i = 0; i < x.size() / dim; ++i) {
    out << i;
    for (int d = 0; d < dim; ++d) {
      std::snprintf(buf, sizeof buf, "%.17g", x[i * dim + d]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

}  // namespace cando
