#pragma once

#include <string>

#include "json.hpp"

#include "bmolab/geometry.hpp"
#include "bmolab/mlcf.hpp"
#include "bmolab/oscillation.hpp"
#include "bmolab/splitting.hpp"
#include "bmolab/stepfn.hpp"

namespace bmolab {

using json = nlohmann::json;

// {"space": "interval"|"circle", "pieces": [{"length":..., "value":...}]}
StepFunction parse_step_function(const json& j);
json to_json(const StepFunction& f);

StepFunction load_step_function(const std::string& path);
void save_step_function(const StepFunction& f, const std::string& path);

// {"kind":"comb","lambda":...,"epsilon":...} or {"kind":"two-disk"}
json to_json(const CombDomain& d);
json to_json(const TwoDiskDomain& d);

json to_json(const AxiomReport& r);
json to_json(const Membership& m);
json to_json(const MainInequalityReport& r);
json to_json(const CounterexampleReport& r);

std::string field_csv(const ScalarField& f);
std::string trace_csv(const InductionTrace& t);
std::string gamma_csv(const PlaneStepFunction& psi, int samples);

}  // namespace bmolab
