#include "tioa/semantics.hpp"

#include <deque>

#include "tioa/error.hpp"

namespace tioa {

Spec::Spec(Tioa a) : base_(std::move(a)) { build_caches(); }

Spec::Spec(Tioa a, std::vector<Federation> cons)
    : base_(std::move(a)), pruned_(true), cons_(std::move(cons)) {
  if (cons_.size() != base_.locations.size())
    throw kit_error("validation", "pruned carrier needs one admissible region per location",
                    base_.name);
  build_caches();
  for (size_t l = 0; l < cons_.size(); ++l)
    if (!subset_eq(cons_[l], inv_[l]))
      throw kit_error("validation",
                      "admissible region exceeds the invariant at location '" +
                          base_.locations[l].id + "'",
                      base_.name);
}

void Spec::build_caches() {
  full_ = Federation::full(base_.clocks);
  inv_.reserve(base_.locations.size());
  for (const Location& loc : base_.locations)
    inv_.push_back(compile_guard(loc.invariant, base_.clocks));

  by_source_.assign(base_.locations.size(), {});
  guard_.reserve(base_.edges.size());
  enabled_.reserve(base_.edges.size());
  for (size_t i = 0; i < base_.edges.size(); ++i) {
    const Edge& e = base_.edges[i];
    int src = base_.loc_index(e.source);
    int tgt = base_.loc_index(e.target);
    src_.push_back(src);
    tgt_.push_back(tgt);
    by_source_[src].push_back(static_cast<int>(i));
    guard_.push_back(compile_guard(e.guard, base_.clocks));
    Federation en = intersect(guard_.back(), pre_reset(admissible(tgt), base_.reset_cols(e)));
    if (pruned_) en = intersect(std::move(en), cons_[src]);
    enabled_.push_back(std::move(en));
  }
}

Federation Spec::edge_pre(int e, const Federation& target_set) const {
  Federation pre = intersect(guard_[e],
                             pre_reset(intersect(admissible(tgt_[e]), target_set),
                                       base_.reset_cols(base_.edges[e])));
  if (pruned_) pre = intersect(std::move(pre), cons_[src_[e]]);
  return pre;
}

Federation Spec::edge_post(int e, const Federation& source_set) const {
  Federation fired = intersect(source_set, enabled_[e]);
  return intersect(reset(std::move(fired), base_.reset_cols(base_.edges[e])),
                   admissible(tgt_[e]));
}

Federation Spec::output_enabled(int l) const {
  Federation out = Federation::empty(base_.clocks);
  for (int e : by_source_[l])
    if (base_.is_output(base_.edges[e].action)) out = unite(std::move(out), enabled_[e]);
  return out;
}

SymbolicState initial_state(const Spec& s) {
  return {s.initial_location(), Federation::zero_point(s.automaton().clocks)};
}

SymbolicState delay_successor(const SymbolicState& s, const Federation& inv) {
  return {s.location, fwd_closed(s.valuations, inv)};
}

SymbolicState delay_successor(const Spec& spec, const SymbolicState& s) {
  return delay_successor(s, spec.admissible(s.location));
}

std::vector<SymbolicState> discrete_successors(const Spec& spec, const SymbolicState& s,
                                               const std::string& action) {
  std::vector<SymbolicState> out;
  for (int e : spec.edges_from(s.location)) {
    if (spec.automaton().edges[e].action != action) continue;
    Federation post = spec.edge_post(e, s.valuations);
    if (!post.is_empty()) out.push_back({spec.edge_target(e), std::move(post)});
  }
  return out;
}

std::vector<SymbolicState> reachable(const Spec& spec) {
  const Tioa& a = spec.automaton();
  const std::vector<int> caps = a.clock_caps();
  std::vector<Federation> seen(a.locations.size(), Federation::empty(a.clocks));

  SymbolicState init = delay_successor(spec, initial_state(spec));
  init.valuations = extrapolate(std::move(init.valuations), caps);
  seen[init.location] = init.valuations;
  std::deque<SymbolicState> waiting{init};

  while (!waiting.empty()) {
    SymbolicState cur = std::move(waiting.front());
    waiting.pop_front();
    for (int e : spec.edges_from(cur.location)) {
      Federation post = spec.edge_post(e, cur.valuations);
      if (post.is_empty()) continue;
      int tgt = spec.edge_target(e);
      Federation closed =
          extrapolate(fwd_closed(std::move(post), spec.admissible(tgt)), caps);
      if (subset_eq(closed, seen[tgt])) continue;
      seen[tgt] = unite(std::move(seen[tgt]), closed);
      waiting.push_back({tgt, std::move(closed)});
    }
  }

  std::vector<SymbolicState> out;
  for (size_t l = 0; l < seen.size(); ++l)
    if (!seen[l].is_empty()) out.push_back({static_cast<int>(l), std::move(seen[l])});
  return out;
}

Spec reach_prune(const Spec& spec) {
  const Tioa& a = spec.automaton();
  std::vector<Federation> reach(a.locations.size(), Federation::empty(a.clocks));
  for (SymbolicState& s : reachable(spec)) reach[s.location] = std::move(s.valuations);

  Tioa kept;
  kept.name = a.name;
  kept.clocks = a.clocks;
  kept.inputs = a.inputs;
  kept.outputs = a.outputs;
  std::vector<Federation> kept_cons;
  for (size_t l = 0; l < a.locations.size(); ++l) {
    if (reach[l].is_empty()) continue;
    if (static_cast<int>(l) == a.initial) kept.initial = static_cast<int>(kept.locations.size());
    kept.locations.push_back(a.locations[l]);
    if (spec.is_pruned()) kept_cons.push_back(spec.admissible(static_cast<int>(l)));
  }
  for (int e = 0; e < spec.edge_count(); ++e) {
    if (reach[spec.edge_source(e)].is_empty() || reach[spec.edge_target(e)].is_empty()) continue;
    if (intersect(reach[spec.edge_source(e)], spec.edge_enabled(e)).is_empty()) continue;
    kept.edges.push_back(a.edges[e]);
  }
  if (spec.is_pruned()) return Spec(std::move(kept), std::move(kept_cons));
  return Spec(std::move(kept));
}

}  // namespace tioa
