#pragma once

#include <string>
#include <vector>

#include "tioa/model.hpp"
#include "tioa/zones.hpp"

namespace tioa {

// One symbolic state: a location index plus a federation of clock valuations.
struct SymbolicState {
  int location = -1;
  Federation valuations;
};

// A specification carrier: a timed I/O automaton together with the admissible
// valuation region per location. For a plain automaton that region is the
// compiled invariant. Adversarial pruning replaces it with the consistent
// subset, which then restricts where time may pass, which valuations exist at
// all, and which edge firings survive.
class Spec {
public:
  explicit Spec(Tioa a);
  Spec(Tioa a, std::vector<Federation> cons);

  const Tioa& automaton() const { return base_; }
  bool is_pruned() const { return pruned_; }

  int location_count() const { return static_cast<int>(base_.locations.size()); }
  int edge_count() const { return static_cast<int>(base_.edges.size()); }
  const std::string& location_id(int l) const { return base_.locations[l].id; }
  int initial_location() const { return base_.initial; }

  // Compiled invariant of the underlying automaton.
  const Federation& invariant(int l) const { return inv_[l]; }

  // Valuations where the system may reside and let time pass at l: the
  // invariant region, or the consistent region once pruned.
  const Federation& admissible(int l) const { return pruned_ ? cons_[l] : inv_[l]; }

  // The full state space at l. A plain automaton has states at every
  // valuation (outside the invariant they merely admit no delay, discrete
  // steps can still fire); pruning removes everything inconsistent.
  const Federation& state_space(int l) const { return pruned_ ? cons_[l] : full_; }

  const Federation& edge_guard(int e) const { return guard_[e]; }

  // Source valuations from which edge e can fire into an admissible target
  // valuation (for pruned carriers, also clipped to the surviving source set).
  const Federation& edge_enabled(int e) const { return enabled_[e]; }

  // Source valuations from which edge e fires into admissible ∩ target_set.
  Federation edge_pre(int e, const Federation& target_set) const;

  // Successor valuations of edge e fired from source_set.
  Federation edge_post(int e, const Federation& source_set) const;

  const std::vector<int>& edges_from(int l) const { return by_source_[l]; }
  int edge_source(int e) const { return src_[e]; }
  int edge_target(int e) const { return tgt_[e]; }

  // Union of the enabled regions of all output edges leaving l.
  Federation output_enabled(int l) const;

private:
  void build_caches();

  Tioa base_;
  bool pruned_ = false;
  std::vector<Federation> cons_;
  std::vector<Federation> inv_;
  std::vector<Federation> guard_;
  std::vector<Federation> enabled_;
  std::vector<std::vector<int>> by_source_;
  std::vector<int> src_;
  std::vector<int> tgt_;
  Federation full_ = Federation::full({});
};

// The initial symbolic state: initial location, all clocks at zero.
SymbolicState initial_state(const Spec& s);

// Time-forward closure of s.valuations inside inv, chaining across pieces of
// a disjunctive region whenever every intermediate point stays admissible.
SymbolicState delay_successor(const SymbolicState& s, const Federation& inv);
SymbolicState delay_successor(const Spec& spec, const SymbolicState& s);

// One successor per edge labelled `action` that can fire from s; empty
// results are dropped.
std::vector<SymbolicState> discrete_successors(const Spec& spec, const SymbolicState& s,
                                               const std::string& action);

// Zone-graph exploration with delay closure, extrapolation and inclusion
// subsumption. Returns one state per reached location (union of its explored
// valuations), in location order.
std::vector<SymbolicState> reachable(const Spec& spec);

// Drops locations never reached and edges that can never fire; location ids
// and the admissible regions of the survivors are preserved.
Spec reach_prune(const Spec& spec);

}  // namespace tioa
