#include "bmolab/json_io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bmolab/util.hpp"

namespace bmolab {

StepFunction parse_step_function(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("step function: expected a JSON object");
  if (!j.contains("space") || !j["space"].is_string())
    throw std::invalid_argument("step function: missing string field 'space'");
  std::string sp = j["space"].get<std::string>();
  Space space;
  if (sp == "interval")
    space = Space::Interval;
  else if (sp == "circle")
    space = Space::Circle;
  else
    throw std::invalid_argument("step function: 'space' must be 'interval' or 'circle'");
  if (!j.contains("pieces") || !j["pieces"].is_array() || j["pieces"].empty())
    throw std::invalid_argument("step function: 'pieces' must be a non-empty array");

  std::vector<Piece> pieces;
  pieces.reserve(j["pieces"].size());
  for (size_t i = 0; i < j["pieces"].size(); ++i) {
    const json& pj = j["pieces"][i];
    std::string path = "pieces[" + std::to_string(i) + "]";
    if (!pj.is_object() || !pj.contains("length") || !pj.contains("value"))
      throw std::invalid_argument("step function: " + path + " needs 'length' and 'value'");
    if (!pj["length"].is_number() || !pj["value"].is_number())
      throw std::invalid_argument("step function: " + path + " fields must be numbers");
    double len = pj["length"].get<double>();
    double val = pj["value"].get<double>();
    if (!(len > 0.0))
      throw std::invalid_argument("step function: " + path + ".length must be positive");
    if (!std::isfinite(val))
      throw std::invalid_argument("step function: " + path + ".value must be finite");
    pieces.push_back({len, val});
  }
  return StepFunction(space, std::move(pieces));
}

json to_json(const StepFunction& f) {
  json j;
  j["space"] = f.space() == Space::Interval ? "interval" : "circle";
  j["pieces"] = json::array();
  for (const Piece& p : f.pieces()) j["pieces"].push_back({{"length", p.length}, {"value", p.value}});
  return j;
}

StepFunction load_step_function(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("file not found: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("invalid JSON in " + path + ": " + e.what());
  }
  return parse_step_function(j);
}

void save_step_function(const StepFunction& f, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write: " + path);
  out << to_json(f).dump(2) << "\n";
}

json to_json(const CombDomain& d) {
  return {{"kind", "comb"}, {"lambda", d.lambda()}, {"epsilon", d.epsilon()}};
}

json to_json(const TwoDiskDomain&) { return {{"kind", "two-disk"}}; }

json to_json(const AxiomReport& r) {
  json j;
  j["all_pass"] = r.all_pass;
  j["axioms"] = json::array();
  for (const AxiomCheck& c : r.checks)
    j["axioms"].push_back({{"axiom", c.axiom}, {"pass", c.pass}, {"witness", c.witness}});
  return j;
}

json to_json(const Membership& m) {
  json j;
  j["member"] = m.member;
  j["strict"] = m.strict;
  j["weak_norm"] = m.weak_norm;
  if (m.witness) j["witness"] = {{"a", m.witness->a}, {"b", m.witness->b}};
  j["circle_mean_ok"] = m.circle_mean_ok;
  return j;
}

json to_json(const MainInequalityReport& r) {
  json j;
  j["verdict"] = to_string(r.verdict);
  if (!r.reason.empty()) j["reason"] = r.reason;
  j["membership"] = to_json(r.membership);
  j["root_ok"] = r.root_ok;
  j["bellman_at_mean"] = r.b0;
  j["exp_average"] = r.exp_avg;
  j["margin"] = r.margin;
  j["generations"] = r.trace.generations.size();
  j["splits"] = r.trace.split_count;
  j["leaf_mass"] = r.trace.leaf_mass;
  j["frontier_mass"] = r.trace.frontier_mass;
  j["worst_clearance"] = r.trace.worst_clearance;
  j["worst_recombination"] = r.trace.worst_recombination;
  return j;
}

json to_json(const CounterexampleReport& r) {
  json j;
  j["mean"] = {{"x1", r.mean.x1}, {"x2", r.mean.x2}};
  j["mean_outside_hull"] = r.mean_outside_hull;
  j["obstacle_clearance"] = r.obstacle_clearance;
  j["f_average"] = r.f_average;
  j["solver_value"] = r.solver_value;
  j["inequality_violated"] = r.inequality_violated;
  j["grid"] = r.grid;
  j["iterations"] = r.stats.iterations;
  j["residual"] = r.stats.residual;
  return j;
}

std::string field_csv(const ScalarField& f) {
  std::ostringstream out;
  out << "x1,x2,tag,value\n";
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) {
      PlanePoint p = f.pos(i, j);
      const char* tag = "outside";
      CellTag t = f.mask[f.idx(i, j)];
      if (t == CellTag::Free) tag = "free";
      if (t == CellTag::Dirichlet) tag = "dirichlet";
      out << fmt_g17(p.x1) << ',' << fmt_g17(p.x2) << ',' << tag << ',';
      if (t == CellTag::Outside)
        out << "nan";
      else
        out << fmt_g17(f.values[f.idx(i, j)]);
      out << '\n';
    }
  return out.str();
}

std::string trace_csv(const InductionTrace& t) {
  std::ostringstream out;
  out << "generation,a,b,x1,x2,bellman_sum\n";
  for (size_t g = 0; g < t.generations.size(); ++g) {
    const Generation& gen = t.generations[g];
    if (gen.intervals.empty())
      out << g << ",,,,," << fmt_g17(gen.bellman_sum) << '\n';
    for (const GenerationEntry& e : gen.intervals)
      out << g << ',' << fmt_g17(e.a) << ',' << fmt_g17(e.b) << ',' << fmt_g17(e.x.x1)
          << ',' << fmt_g17(e.x.x2) << ',' << fmt_g17(gen.bellman_sum) << '\n';
  }
  return out.str();
}

std::string gamma_csv(const PlaneStepFunction& psi, int samples) {
  if (samples < 2) throw std::invalid_argument("gamma_csv: need at least 2 samples");
  std::ostringstream out;
  out << "t,x1,x2\n";
  for (int k = 1; k <= samples; ++k) {
    double t = static_cast<double>(k) / samples;
    PlanePoint g = gamma(psi, t);
    out << fmt_g17(t) << ',' << fmt_g17(g.x1) << ',' << fmt_g17(g.x2) << '\n';
  }
  return out.str();
}

}  // namespace bmolab
