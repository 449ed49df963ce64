#include "cando/solver_config.hpp"

#include <functional>
#include <map>

#include <json.hpp>

#include "cando/error.hpp"

namespace cando {

using nlohmann::json;

SolverKind parse_solver(const std::string& name) {
  if (name == "cpras") return SolverKind::Cpras;
  if (name == "cone") return SolverKind::Cone;
  fail(ErrorCode::InvalidArgument, "unknown solver '" + name + "' (expected cpras or cone)");
}

const char* to_string(SolverKind kind) { return kind == SolverKind::Cpras ? "cpras" : "cone"; }

namespace {

using Setter = std::function<void(const json&)>;

json parse_object(const std::string& text, const char* what) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return json::object();
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::Parse, std::string(what) + ": " + e.what());
  }
  require(doc.is_object(), ErrorCode::Parse, std::string(what) + ": expected a JSON object");
  return doc;
}

void apply(const json& doc, const std::map<std::string, Setter>& setters, const char* what) {
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    auto s = setters.find(it.key());
    require(s != setters.end(), ErrorCode::Parse,
            std::string(what) + ": unknown key '" + it.key() + "'");
    try {
      s->second(it.value());
    } catch (const json::exception& e) {
      fail(ErrorCode::Parse, std::string(what) + ": bad value for '" + it.key() + "': " + e.what());
    }
  }
}

template <typename T>
Setter set(T& field) {
  return [&field](const json& v) { field = v.get<T>(); };
}

Setter set_optional(std::optional<double>& field) {
  return [&field](const json& v) {
    if (v.is_null()) field.reset();
    else field = v.get<double>();
  };
}

void lsqr_setters(std::map<std::string, Setter>& s, LsqrOptions& o) {
  s["lsqr_rel_tol"] = set(o.rel_tol);
  s["lsqr_max_iter"] = set(o.max_iter);
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

CprasParams cpras_params_from_json(const std::string& text) {
  CprasParams p;
  std::map<std::string, Setter> s{
      {"eta", set_optional(p.eta)},
      {"delta0", set(p.delta0)},
      {"gamma1", set(p.gamma1)},
      {"gamma2", set(p.gamma2)},
      {"beta", set(p.beta)},
      {"epsilon", set(p.epsilon)},
      {"max_outer", set(p.max_outer)},
      {"max_backtracks", set(p.max_backtracks)},
      {"x0", set(p.x0)},
      {"sigma0", set(p.sigma0)},
      {"lambda0", set(p.lambda0)},
      {"slack_gap", set(p.slack_gap)},
      {"delta_floor", set(p.delta_floor)},
      {"square_fallback", set(p.square_fallback)},
      {"slack_sign",
       [&p](const json& v) {
         const auto name = v.get<std::string>();
         require(name == "slack" || name == "literal", ErrorCode::Parse,
                 "cpras params: slack_sign must be 'slack' or 'literal'");
         p.form.slack = name == "slack" ? SlackSign::Slack : SlackSign::Literal;
       }},
      {"multiplier_sign",
       [&p](const json& v) {
         const auto name = v.get<std::string>();
         require(name == "lagrangian" || name == "literal", ErrorCode::Parse,
                 "cpras params: multiplier_sign must be 'lagrangian' or 'literal'");
         p.form.multiplier =
             name == "lagrangian" ? MultiplierSign::Lagrangian : MultiplierSign::Literal;
       }},
  };
  lsqr_setters(s, p.lsqr);
  apply(parse_object(text, "cpras params"), s, "cpras params");
  return p;
}

ConeParams cone_params_from_json(const std::string& text) {
  ConeParams p;
  std::map<std::string, Setter> s{
      {"eta", set_optional(p.eta)},
      {"gamma1", set(p.gamma1)},
      {"beta", set(p.beta)},
      {"epsilon", set(p.epsilon)},
      {"max_outer", set(p.max_outer)},
      {"max_backtracks", set(p.max_backtracks)},
      {"x0", set(p.x0)},
      {"sigma0", set(p.sigma0)},
      {"multiplier0", set(p.multiplier0)},
      {"slack_shift", set(p.slack_shift)},
      {"dense_max_cols", set(p.dense_max_cols)},
      {"square_fallback", set(p.square_fallback)},
  };
  lsqr_setters(s, p.lsqr);
  apply(parse_object(text, "cone params"), s, "cone params");
  return p;
}

std::string cpras_params_to_json(const CprasParams& p) {
  json doc{{"eta", optional_json(p.eta)},
           {"delta0", p.delta0},
           {"gamma1", p.gamma1},
           {"gamma2", p.gamma2},
           {"beta", p.beta},
           {"epsilon", p.epsilon},
           {"max_outer", p.max_outer},
           {"max_backtracks", p.max_backtracks},
           {"x0", p.x0},
           {"sigma0", p.sigma0},
           {"lambda0", p.lambda0},
           {"slack_gap", p.slack_gap},
           {"delta_floor", p.delta_floor},
           {"square_fallback", p.square_fallback},
           {"slack_sign", p.form.slack == SlackSign::Slack ? "slack" : "literal"},
           {"multiplier_sign",
            p.form.multiplier == MultiplierSign::Lagrangian ? "lagrangian" : "literal"},
           {"lsqr_rel_tol", p.lsqr.rel_tol},
           {"lsqr_max_iter", p.lsqr.max_iter}};
  return doc.dump(1) + "\n";
}

std::string cone_params_to_json(const ConeParams& p) {
  json doc{{"eta", optional_json(p.eta)},
           {"gamma1", p.gamma1},
           {"beta", p.beta},
           {"epsilon", p.epsilon},
           {"max_outer", p.max_outer},
           {"max_backtracks", p.max_backtracks},
           {"x0", p.x0},
           {"sigma0", p.sigma0},
           {"multiplier0", p.multiplier0},
           {"slack_shift", p.slack_shift},
           {"dense_max_cols", p.dense_max_cols},
           {"square_fallback", p.square_fallback},
           {"lsqr_rel_tol", p.lsqr.rel_tol},
           {"lsqr_max_iter", p.lsqr.max_iter}};
  return doc.dump(1) + "\n";
}

SolveReport run_solver(const SnlInstance& inst, SolverKind kind, const std::string& params_json) {
  if (kind == SolverKind::Cpras) return solve(inst, cpras_params_from_json(params_json));
  const ConeParams params = cone_params_from_json(params_json);
  inst.validate();
  require(inst.n() <= kConeMaxDim, ErrorCode::SizeGuard,
          "cone: primal dimension exceeds the dense limit of " + std::to_string(kConeMaxDim));
  SolveReport report = cone_solve(to_canonical(inst, kConeMaxDim), params);
  if (inst.truth) report.rmsd = rmsd(report.x, inst);
  return report;
}

}  // namespace cando
