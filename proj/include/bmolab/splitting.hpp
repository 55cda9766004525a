#pragma once

#include <string>
#include <vector>

#include "bmolab/bellman.hpp"
#include "bmolab/oscillation.hpp"
#include "bmolab/stepfn.hpp"

namespace bmolab {

enum class SplitCase { A, BAbove, BBelow };

const char* to_string(SplitCase c);

struct SplitResult {
  double t0 = 0.5;  // relative split position in (0,1)
  SplitCase kind = SplitCase::A;
  PlanePoint left_avg, right_avg;
  double clearance = 0.0;            // of the chord [left_avg, right_avg]
  double recombination_error = 0.0;  // |parent - weighted children|, coordinatewise max
};

// Constructive splitting: cuts (a,b) so that the chord between the two child
// averages avoids the open hull interior.  Case A moves an endpoint until the
// chord grazes the hull; case B places a child average on the supporting
// chord line through the parent.
SplitResult split(const PlaneStepFunction& psi, double a, double b, const CombDomain& d);

struct GenerationEntry {
  double a = 0.0, b = 0.0;
  PlanePoint x;
};

struct Generation {
  std::vector<GenerationEntry> intervals;  // frontier after this generation
  double bellman_sum = 0.0;                // leaves so far + frontier Bellman mass
};

struct InductionTrace {
  std::vector<Generation> generations;
  double leaf_mass = 0.0;
  double frontier_mass = 0.0;
  double final_sum_f = 0.0;  // sum over leaves of |J| * e^{mu * value}
  double worst_clearance = 0.0;
  double worst_recombination = 0.0;
  long long split_count = 0;
};

InductionTrace induct(const PlaneStepFunction& psi, const CombDomain& d,
                      const BellmanEvaluator& ev, int max_depth, double mass_tol);

enum class Verdict { Pass, Fail, Skipped };

const char* to_string(Verdict v);

struct MainInequalityReport {
  Verdict verdict = Verdict::Skipped;
  std::string reason;
  Membership membership;
  bool root_ok = false;
  double b0 = 0.0;       // Bellman value at the global average
  double exp_avg = 0.0;  // exact <e^{mu phi}>
  double margin = 0.0;   // b0 - exp_avg
  InductionTrace trace;
};

// Full pipeline: class membership, root-position check, induction run, and
// the inequality <f(psi)> <= B(<psi>) with margins.
MainInequalityReport verify_main_inequality(const StepFunction& phi, const CombDomain& d,
                                            const BellmanEvaluator& ev, int max_depth = 64,
                                            double mass_tol = 1e-10);

}  // namespace bmolab
