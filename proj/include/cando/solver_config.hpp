#pragma once

#include <string>

#include "cando/cone.hpp"
#include "cando/cpras.hpp"
#include "cando/report.hpp"
#include "cando/snl.hpp"

namespace cando {

enum class SolverKind { Cpras, Cone };

// "cpras" or "cone"; anything else is InvalidArgument.
SolverKind parse_solver(const std::string& name);
const char* to_string(SolverKind kind);

// Flat JSON objects whose keys mirror the parameter structs. Omitted keys keep
// their defaults; unknown keys and wrong types are Parse errors. An empty
// string means all defaults.
CprasParams cpras_params_from_json(const std::string& text);
ConeParams cone_params_from_json(const std::string& text);
std::string cpras_params_to_json(const CprasParams& params);
std::string cone_params_to_json(const ConeParams& params);

// Runs the chosen solver on inst. The cone path goes through the dense
// canonical form and is limited by its size guard. rmsd is filled in
// whenever inst carries ground truth.
SolveReport run_solver(const SnlInstance& inst, SolverKind kind, const std::string& params_json);

}  // namespace cando
