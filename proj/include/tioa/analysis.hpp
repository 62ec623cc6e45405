#pragma once

#include <string>
#include <vector>

#include "tioa/semantics.hpp"

namespace tioa {

// Per-location state sets, indexed like the automaton's location list. All
// published sets are clipped to the admissible region of their Spec.
using StateSet = std::vector<Federation>;

// States that lose without any environment move: the invariant bounds delay
// and no admissible delay reaches an enabled output.
StateSet immediate_errors(const Spec& s);

// States that lose once `x` is declared lost: delay is bounded and every
// delay-reachable output lands inside x.
StateSet error_states(const Spec& s, const StateSet& x);

// Valuations where some declared input has no enabled edge; the environment
// wins by offering that input.
StateSet blocked_inputs(const Spec& s);

// One application of the environment's attractor: error states plus states
// the environment can drive into x (directly, through an input, or through a
// blocked input) before any output can escape.
StateSet pi_step(const Spec& s, const StateSet& x);

// Least fixpoint of pi_step from the empty set, keeping the whole chain for
// counterexample extraction.
struct InconsChain {
  std::vector<StateSet> chain;  // chain.front() empty, chain.back() fixpoint
  const StateSet& fixpoint() const { return chain.back(); }
  int iterations() const { return static_cast<int>(chain.size()) - 1; }
};
InconsChain inconsistent_chain(const Spec& s);
StateSet inconsistent_states(const Spec& s);

// Admissible states minus the inconsistent ones.
StateSet consistent_states(const Spec& s);

struct TraceMove {
  bool is_delay = false;
  Rat amount;          // delay duration when is_delay
  std::string action;  // otherwise the fired action, suffixed ? or !
};

// One row of a relation certifying a positive verdict. `right` stays empty
// for single-automaton checks.
struct WitnessRow {
  std::string left;
  std::string right;
  std::string zone;
};

struct Verdict {
  bool holds = false;
  std::vector<WitnessRow> witness;        // filled when holds
  std::vector<TraceMove> counterexample;  // filled when not (may be empty)
  std::string reason;                     // cause of a negative verdict
  int iterations = 0;
  int symbolic_states = 0;
};

// The zero valuation of the initial location avoids the inconsistent states.
// A negative verdict carries an environment strategy as a trace of delays
// and actions.
Verdict consistency(const Spec& s);

// Independent progress at every admissible state of every location.
bool is_locally_consistent(const Spec& s);
Verdict local_consistency_verdict(const Spec& s);

// Restriction of a consistent spec to its consistent states. Throws
// kit_error("precondition") when the spec is inconsistent.
Spec prune_adversarial(const Spec& s);

struct ImplementationIssue {
  std::string location;
  std::string region;
  std::string reason;  // "output urgency" | "independent progress" | "input enabledness"
};
struct ImplementationReport {
  bool ok = true;
  std::vector<ImplementationIssue> issues;
};

// Output urgency (an enabled output forbids further delay), independent
// progress, and input enabledness, reported per violating region.
ImplementationReport is_implementation(const Spec& s);
Verdict implementation_verdict(const Spec& s);

// Alternating timed simulation: inputs of t answered by s, outputs of s
// allowed by t, delays of s matched by t. Throws kit_error("precondition")
// when the alphabets do not line up.
Verdict refinement(const Spec& s, const Spec& t);

// Two-way matching of every action and delay; non-shared actions move one
// side while the other stays.
Verdict bisimilar(const Spec& s, const Spec& t);

}  // namespace tioa
