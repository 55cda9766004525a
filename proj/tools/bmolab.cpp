#include <clocale>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "bmolab/bellman.hpp"
#include "bmolab/extremal.hpp"
#include "bmolab/json_io.hpp"
#include "bmolab/mlcf.hpp"
#include "bmolab/oscillation.hpp"
#include "bmolab/splitting.hpp"
#include "bmolab/util.hpp"

using namespace bmolab;

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write: " + path);
  out << content;
}

std::vector<double> parse_values(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  if (out.empty()) throw std::invalid_argument("--values: no numbers given");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"oscillation norms, comb-domain Bellman functions, and minimal locally "
               "concave fields for step functions"};
  app.require_subcommand(1);

  // ---- norms ----------------------------------------------------------
  auto* cmd_norms = app.add_subcommand("norms", "oscillation norms of a step function");
  std::string norms_file;
  double norms_lambda = 1.0, norms_epsilon = -1.0;
  int norms_depth = 12, norms_kmax = 64, gamma_samples = 256;
  std::string gamma_out;
  cmd_norms->add_option("file", norms_file, "step function JSON")->required();
  cmd_norms->add_option("--lambda", norms_lambda, "lattice spacing")->check(CLI::PositiveNumber);
  cmd_norms->add_option("--epsilon", norms_epsilon, "class bound (adds membership block)");
  cmd_norms->add_option("--dyadic-depth", norms_depth, "dyadic generation cap");
  cmd_norms->add_option("--k-max", norms_kmax, "circle window length cap");
  cmd_norms->add_option("--gamma-out", gamma_out, "write prefix-curve samples CSV here");
  cmd_norms->add_option("--gamma-samples", gamma_samples, "prefix-curve sample count");

  // ---- bellman-eval ---------------------------------------------------
  auto* cmd_eval = app.add_subcommand("bellman-eval", "closed-form value at a point");
  double be_lambda = 1.0, be_epsilon = 1.0, be_mu = 0.5, be_x1 = 0.0, be_x2 = 1.0;
  cmd_eval->add_option("--lambda", be_lambda)->required()->check(CLI::PositiveNumber);
  cmd_eval->add_option("--epsilon", be_epsilon)->required()->check(CLI::PositiveNumber);
  cmd_eval->add_option("--mu", be_mu)->required()->check(CLI::PositiveNumber);
  cmd_eval->add_option("--x1", be_x1)->required();
  cmd_eval->add_option("--x2", be_x2)->required();

  // ---- mu-crit --------------------------------------------------------
  auto* cmd_mucrit = app.add_subcommand("mu-crit", "critical exponent");
  double mc_lambda = 1.0, mc_epsilon = 1.0;
  cmd_mucrit->add_option("--lambda", mc_lambda)->required()->check(CLI::PositiveNumber);
  cmd_mucrit->add_option("--epsilon", mc_epsilon)->required()->check(CLI::PositiveNumber);

  // ---- extremal -------------------------------------------------------
  auto* cmd_ext = app.add_subcommand("extremal", "build the geometric-piece extremal");
  double ex_lambda = 1.0, ex_epsilon = 1.0;
  int ex_pieces = 0;
  std::string ex_out;
  cmd_ext->add_option("--lambda", ex_lambda)->required()->check(CLI::PositiveNumber);
  cmd_ext->add_option("--epsilon", ex_epsilon)->required()->check(CLI::PositiveNumber);
  cmd_ext->add_option("--pieces", ex_pieces, "piece count (default: tail below 1e-12)");
  cmd_ext->add_option("--out", ex_out, "write the function JSON here");

  // ---- sharpness ------------------------------------------------------
  auto* cmd_sharp = app.add_subcommand("sharpness", "extremal series vs closed form");
  double sh_lambda = 1.0, sh_epsilon = 1.0, sh_mu = 0.5;
  int sh_pieces = 0;
  cmd_sharp->add_option("--lambda", sh_lambda)->required()->check(CLI::PositiveNumber);
  cmd_sharp->add_option("--epsilon", sh_epsilon)->required()->check(CLI::PositiveNumber);
  cmd_sharp->add_option("--mu", sh_mu)->required()->check(CLI::PositiveNumber);
  cmd_sharp->add_option("--pieces", sh_pieces, "series terms (default: tail below 1e-12)");

  // ---- induct ---------------------------------------------------------
  auto* cmd_induct = app.add_subcommand("induct", "splitting induction for a step function");
  std::string in_file, in_trace;
  double in_lambda = 1.0, in_epsilon = 1.0, in_mu = 0.5, in_mass_tol = 1e-10;
  int in_depth = 64;
  cmd_induct->add_option("file", in_file, "step function JSON")->required();
  cmd_induct->add_option("--lambda", in_lambda)->required()->check(CLI::PositiveNumber);
  cmd_induct->add_option("--epsilon", in_epsilon)->required()->check(CLI::PositiveNumber);
  cmd_induct->add_option("--mu", in_mu)->required()->check(CLI::PositiveNumber);
  cmd_induct->add_option("--max-depth", in_depth);
  cmd_induct->add_option("--mass-tol", in_mass_tol);
  cmd_induct->add_option("--trace-out", in_trace, "write the generation trace CSV here");

  // ---- mlcf -----------------------------------------------------------
  auto* cmd_mlcf = app.add_subcommand("mlcf", "grid minimal locally concave function");
  std::string mf_domain = "comb", mf_edge = "constant", mf_out;
  double mf_lambda = 1.0, mf_epsilon = 1.0, mf_mu = 0.5, mf_tol = 1e-7;
  int mf_grid = 128, mf_iters = 20000;
  cmd_mlcf->add_option("--domain", mf_domain)->check(CLI::IsMember({"comb", "two-disk"}));
  cmd_mlcf->add_option("--grid", mf_grid)->check(CLI::Range(8, 1024));
  cmd_mlcf->add_option("--tol", mf_tol)->check(CLI::PositiveNumber);
  cmd_mlcf->add_option("--max-iters", mf_iters)->check(CLI::PositiveNumber);
  cmd_mlcf->add_option("--lambda", mf_lambda)->check(CLI::PositiveNumber);
  cmd_mlcf->add_option("--epsilon", mf_epsilon)->check(CLI::PositiveNumber);
  cmd_mlcf->add_option("--mu", mf_mu)->check(CLI::PositiveNumber);
  cmd_mlcf->add_option("--edge", mf_edge)->check(CLI::IsMember({"closed-form", "constant"}));
  cmd_mlcf->add_option("--out", mf_out, "write the field CSV here");

  // ---- counterexample -------------------------------------------------
  auto* cmd_ce = app.add_subcommand("counterexample", "two-disk inequality failure report");
  int ce_grid = 256, ce_iters = 20000;
  double ce_tol = 1e-7;
  cmd_ce->add_option("--grid", ce_grid)->check(CLI::Range(16, 2048));
  cmd_ce->add_option("--tol", ce_tol)->check(CLI::PositiveNumber);
  cmd_ce->add_option("--max-iters", ce_iters)->check(CLI::PositiveNumber);

  // ---- axioms ---------------------------------------------------------
  auto* cmd_ax = app.add_subcommand("axioms", "structural axiom report for a domain");
  std::string ax_domain = "comb";
  double ax_lambda = 1.0, ax_epsilon = 1.0;
  cmd_ax->add_option("--domain", ax_domain)->check(CLI::IsMember({"comb", "two-disk"}));
  cmd_ax->add_option("--lambda", ax_lambda)->check(CLI::PositiveNumber);
  cmd_ax->add_option("--epsilon", ax_epsilon)->check(CLI::PositiveNumber);

  // ---- sweep ----------------------------------------------------------
  auto* cmd_sweep = app.add_subcommand("sweep", "parameter sweep to CSV");
  std::string sw_param = "lambda", sw_values, sw_report = "vertex0";
  double sw_lambda = 1.0, sw_epsilon = 1.0, sw_mu = 0.5;
  std::string sw_out;
  cmd_sweep->add_option("--param", sw_param)->check(CLI::IsMember({"lambda", "epsilon", "mu"}));
  cmd_sweep->add_option("--values", sw_values, "comma-separated values")->required();
  cmd_sweep->add_option("--report", sw_report)->check(CLI::IsMember({"vertex0", "mu-crit"}));
  cmd_sweep->add_option("--lambda", sw_lambda)->check(CLI::PositiveNumber);
  cmd_sweep->add_option("--epsilon", sw_epsilon)->check(CLI::PositiveNumber);
  cmd_sweep->add_option("--mu", sw_mu)->check(CLI::PositiveNumber);
  cmd_sweep->add_option("--out", sw_out, "write CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  if (app.got_subcommand(cmd_norms)) {
    StepFunction f = load_step_function(norms_file);
    json j;
    j["global_variance"] = variance(f, 0.0, 1.0);
    if (f.space() == Space::Interval) {
      NormValue b = bmo_norm(f);
      j["bmo"] = {{"value", b.value}, {"argmax", {b.argmax.a, b.argmax.b}}};
      NormValue w = weak_bmo(f, norms_lambda);
      j["weak_bmo"] = {{"value", w.value},
                       {"argmax", {w.argmax.a, w.argmax.b}},
                       {"attained", w.attained}};
    } else {
      CircleNormValue w = weak_bmo_circle(f, norms_lambda, norms_kmax);
      j["weak_bmo"] = {{"value", w.value},
                       {"argmax", {w.argmax.a, w.argmax.b}},
                       {"attained", w.attained},
                       {"error_bar", w.error_bar},
                       {"k_max", norms_kmax}};
    }
    NormValue dy = bmo_dyadic(f, norms_depth);
    j["bmo_dyadic"] = {{"value", dy.value}, {"argmax", {dy.argmax.a, dy.argmax.b}}};
    j["lambda"] = norms_lambda;
    if (norms_epsilon > 0.0) {
      CombDomain d(norms_lambda, norms_epsilon);
      j["membership"] = to_json(membership_A(f, d, false, norms_kmax));
    }
    if (!gamma_out.empty()) write_file(gamma_out, gamma_csv(lift(f), gamma_samples));
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_eval)) {
    CombDomain d(be_lambda, be_epsilon);
    BellmanEvaluator ev(d, be_mu);
    auto r = ev.evaluate({be_x1, be_x2});
    json j;
    j["value"] = r.value;
    j["segment"] = {{"u", r.segment.u},
                    {"vertex_n", r.segment.vertex_n},
                    {"p0", {r.segment.p0.x1, r.segment.p0.x2}},
                    {"p1", {r.segment.p1.x1, r.segment.p1.x2}}};
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_mucrit)) {
    std::cout << fmt_g17(mu_critical(mc_lambda, mc_epsilon)) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_ext)) {
    int n = ex_pieces > 0 ? ex_pieces : default_piece_count(ex_lambda, ex_epsilon);
    ExtremalSpec spec{ex_lambda, ex_epsilon, n};
    StepFunction f = build_extremal(spec);
    json j = to_json(f);
    j["a"] = spec.a();
    j["pieces_built"] = n;
    if (!ex_out.empty()) {
      write_file(ex_out, to_json(f).dump(2) + "\n");
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_sharp)) {
    int n = sh_pieces > 0 ? sh_pieces : default_piece_count(sh_lambda, sh_epsilon);
    ExtremalSpec spec{sh_lambda, sh_epsilon, n};
    ExpAverage ea = exp_average(spec, sh_mu);
    json j;
    j["series"] = ea.value;
    j["partial_sum"] = ea.partial_sum;
    j["tail_bound"] = ea.tail_bound;
    j["ratio"] = ea.ratio;
    j["divergent"] = ea.divergent;
    if (!ea.divergent) {
      CombDomain d(sh_lambda, sh_epsilon);
      BellmanEvaluator ev(d, sh_mu);
      j["closed_form"] = ev.vertex_value(0);
      j["diff"] = ea.value - ev.vertex_value(0);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_induct)) {
    StepFunction f = load_step_function(in_file);
    CombDomain d(in_lambda, in_epsilon);
    BellmanEvaluator ev(d, in_mu);
    MainInequalityReport rep = verify_main_inequality(f, d, ev, in_depth, in_mass_tol);
    if (!in_trace.empty()) write_file(in_trace, trace_csv(rep.trace));
    std::cout << to_json(rep).dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_mlcf)) {
    SolveStats stats;
    ScalarField field;
    if (mf_domain == "comb") {
      CombProblem pr{CombDomain(mf_lambda, mf_epsilon), mf_mu,
                     mf_edge == "closed-form" ? EdgeMode::ClosedForm : EdgeMode::Constant};
      field = solve_comb(pr, mf_grid, mf_tol, mf_iters, &stats);
    } else {
      field = solve_two_disk(mf_grid, mf_tol, mf_iters, &stats);
    }
    if (!mf_out.empty()) write_file(mf_out, field_csv(field));
    json j;
    if (mf_domain == "comb")
      j["domain"] = to_json(CombDomain(mf_lambda, mf_epsilon));
    else
      j["domain"] = to_json(TwoDiskDomain{});
    j["grid"] = mf_grid;
    j["iterations"] = stats.iterations;
    j["residual"] = stats.residual;
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_ce)) {
    CounterexampleReport rep = counterexample_report(ce_grid, ce_tol, ce_iters);
    std::cout << to_json(rep).dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_ax)) {
    json j;
    AxiomReport rep;
    if (ax_domain == "comb") {
      CombDomain d(ax_lambda, ax_epsilon);
      rep = check_axioms(d);
      j["domain"] = to_json(d);
    } else {
      TwoDiskDomain d;
      rep = check_axioms(d);
      j["domain"] = to_json(d);
    }
    j.update(to_json(rep));
    std::cout << j.dump(2) << "\n";
    return 0;
  }

  if (app.got_subcommand(cmd_sweep)) {
    std::vector<double> values = parse_values(sw_values);
    std::ostringstream out;
    out << sw_param << "," << sw_report << "\n";
    for (double v : values) {
      double lam = sw_lambda, eps = sw_epsilon, mu = sw_mu;
      if (sw_param == "lambda") lam = v;
      if (sw_param == "epsilon") eps = v;
      if (sw_param == "mu") mu = v;
      double y;
      if (sw_report == "mu-crit") {
        y = mu_critical(lam, eps);
      } else {
        BellmanEvaluator ev(CombDomain(lam, eps), mu);
        y = ev.vertex_value(0);
      }
      out << fmt_g17(v) << "," << fmt_g17(y) << "\n";
    }
    if (!sw_out.empty())
      write_file(sw_out, out.str());
    else
      std::cout << out.str();
    return 0;
  }

  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  std::setlocale(LC_NUMERIC, "C");
  try {
    return run(argc, argv);
  } catch (const ConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
