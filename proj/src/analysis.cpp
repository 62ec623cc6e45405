#include "tioa/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <deque>
#include <optional>
#include <set>

#include "tioa/error.hpp"

namespace tioa {
namespace {

StateSet empty_sets(const Spec& s) {
  return StateSet(static_cast<size_t>(s.location_count()),
                  Federation::empty(s.automaton().clocks));
}

// Points that keep meeting `stops` at arbitrarily large delays. Per convex
// piece the core is the sub-region whose whole future ray stays inside; any
// point below some core revisits the piece forever.
Federation unbounded_reach(const Federation& stops) {
  Federation cores = Federation::empty(stops.clocks);
  for (const Dbm& z : stops.zones) {
    Federation piece{stops.clocks, {z}};
    cores = unite(std::move(cores), forever_part(piece));
  }
  return down(cores);
}

// Arbitrarily long delays available at l: the invariant must hold along the
// whole ray and admissible stopping points must keep appearing. For a plain
// automaton the two coincide; a pruned carrier can cut the stops short.
Federation forever_set(const Spec& s, int l) {
  return intersect(forever_part(s.invariant(l)), unbounded_reach(s.admissible(l)));
}

// Source valuations from which some output edge of l fires into an
// admissible target valuation outside x: the system's escapes.
Federation output_escapes(const Spec& s, int l, const StateSet& x) {
  const Tioa& a = s.automaton();
  Federation acc = Federation::empty(a.clocks);
  for (int e : s.edges_from(l)) {
    if (!a.is_output(a.edges[static_cast<size_t>(e)].action)) continue;
    acc = unite(std::move(acc), s.edge_pre(e, complement(x[static_cast<size_t>(s.edge_target(e))])));
  }
  return acc;
}

// Source valuations from which some input edge of l fires into x: the
// environment's handles.
Federation input_preds(const Spec& s, int l, const StateSet& x) {
  const Tioa& a = s.automaton();
  Federation acc = Federation::empty(a.clocks);
  for (int e : s.edges_from(l)) {
    if (!a.is_input(a.edges[static_cast<size_t>(e)].action)) continue;
    acc = unite(std::move(acc), s.edge_pre(e, x[static_cast<size_t>(s.edge_target(e))]));
  }
  return acc;
}

}  // namespace

StateSet error_states(const Spec& s, const StateSet& x) {
  StateSet err = empty_sets(s);
  for (int l = 0; l < s.location_count(); ++l) {
    Federation bounded = subtract(s.admissible(l), forever_set(s, l));
    Federation esc = bwd_closed(output_escapes(s, l, x), s.invariant(l));
    err[static_cast<size_t>(l)] = subtract(std::move(bounded), esc);
  }
  return err;
}

StateSet immediate_errors(const Spec& s) { return error_states(s, empty_sets(s)); }

StateSet blocked_inputs(const Spec& s) {
  const Tioa& a = s.automaton();
  StateSet out = empty_sets(s);
  for (int l = 0; l < s.location_count(); ++l) {
    Federation acc = Federation::empty(a.clocks);
    for (const std::string& in : a.inputs) {
      Federation covered = Federation::empty(a.clocks);
      for (int e : s.edges_from(l))
        if (a.edges[static_cast<size_t>(e)].action == in)
          covered = unite(std::move(covered), s.edge_enabled(e));
      acc = unite(std::move(acc), subtract(s.admissible(l), covered));
    }
    out[static_cast<size_t>(l)] = std::move(acc);
  }
  return out;
}

StateSet pi_step(const Spec& s, const StateSet& x) {
  StateSet err = error_states(s, x);
  StateSet blocked = blocked_inputs(s);
  StateSet out = empty_sets(s);
  for (int l = 0; l < s.location_count(); ++l) {
    size_t li = static_cast<size_t>(l);
    Federation target = intersect(
        unite(unite(x[li], input_preds(s, l, x)), blocked[li]), s.admissible(l));
    Federation avoid =
        unite(output_escapes(s, l, x), complement(s.invariant(l)));
    out[li] = unite(std::move(err[li]),
                    intersect(pred_t(target, avoid), s.admissible(l)));
  }
  return out;
}

InconsChain inconsistent_chain(const Spec& s) {
  InconsChain ch;
  ch.chain.push_back(empty_sets(s));
  for (;;) {
    StateSet next = pi_step(s, ch.chain.back());
    bool stable = true;
    for (int l = 0; l < s.location_count(); ++l)
      if (!same_set(next[static_cast<size_t>(l)], ch.chain.back()[static_cast<size_t>(l)])) {
        stable = false;
        break;
      }
    if (stable) break;
    ch.chain.push_back(std::move(next));
  }
  return ch;
}

StateSet inconsistent_states(const Spec& s) { return inconsistent_chain(s).fixpoint(); }

StateSet consistent_states(const Spec& s) {
  StateSet incons = inconsistent_states(s);
  StateSet out = empty_sets(s);
  for (int l = 0; l < s.location_count(); ++l)
    out[static_cast<size_t>(l)] =
        subtract(s.admissible(l), incons[static_cast<size_t>(l)]);
  return out;
}

// ---------------------------------------------------------------------------
// exact rational delays along counterexample traces
// ---------------------------------------------------------------------------

namespace {

// Merges touching intervals so a seam between two convex pieces does not
// look like a gap.
std::vector<DelayInterval> merge_intervals(std::vector<DelayInterval> ivs) {
  std::vector<DelayInterval> out;
  for (const DelayInterval& iv : ivs) {
    if (!out.empty()) {
      DelayInterval& cur = out.back();
      bool joins = false;
      if (!cur.hi_inf) {
        if (iv.lo < cur.hi) joins = true;
        if (iv.lo == cur.hi && !(iv.lo_strict && cur.hi_strict)) joins = true;
      } else {
        joins = true;
      }
      if (joins) {
        if (cur.hi_inf) continue;
        if (iv.hi_inf) {
          cur.hi_inf = true;
        } else if (iv.hi > cur.hi || (iv.hi == cur.hi && !iv.hi_strict)) {
          cur.hi = iv.hi;
          cur.hi_strict = iv.hi_strict;
        }
        continue;
      }
    }
    out.push_back(iv);
  }
  return out;
}

std::vector<DelayInterval> intervals_in(const Federation& f, const std::vector<Rat>& p) {
  return merge_intervals(delay_intervals(f, p));
}

// The maximal interval of delays d with the whole segment [p, p+d] inside f.
// Missing when even d = 0 fails.
struct Prefix {
  bool ok = false;
  Rat hi;
  bool hi_strict = false;
  bool hi_inf = false;
};

Prefix delay_prefix(const Federation& f, const std::vector<Rat>& p) {
  auto ivs = intervals_in(f, p);
  if (ivs.empty() || ivs.front().lo != Rat(0) || ivs.front().lo_strict) return {};
  return {true, ivs.front().hi, ivs.front().hi_strict, ivs.front().hi_inf};
}

// Restricts intervals to d <= m (hitting something strictly earlier is what
// must be avoided, so the boundary itself stays allowed).
std::vector<DelayInterval> clip_at_most(std::vector<DelayInterval> ivs, const Rat& m) {
  std::vector<DelayInterval> out;
  for (DelayInterval iv : ivs) {
    if (iv.lo > m) continue;
    if (iv.hi_inf || iv.hi > m) {
      iv.hi = m;
      iv.hi_strict = false;
      iv.hi_inf = false;
    }
    if (iv.hi == iv.lo && (iv.lo_strict || iv.hi_strict)) continue;
    out.push_back(iv);
  }
  return out;
}

std::vector<DelayInterval> clip_to_prefix(std::vector<DelayInterval> ivs, const Prefix& pre) {
  if (!pre.ok) return {};
  if (pre.hi_inf) return ivs;
  std::vector<DelayInterval> out;
  for (DelayInterval iv : ivs) {
    if (iv.lo > pre.hi || (iv.lo == pre.hi && (iv.lo_strict || pre.hi_strict))) continue;
    bool trim = iv.hi_inf || iv.hi > pre.hi;
    if (!trim && iv.hi == pre.hi && pre.hi_strict && !iv.hi_strict) trim = true;
    if (trim) {
      iv.hi = pre.hi;
      iv.hi_strict = pre.hi_strict;
      iv.hi_inf = false;
    }
    if (iv.hi == iv.lo && (iv.lo_strict || iv.hi_strict)) continue;
    out.push_back(iv);
  }
  return out;
}

std::vector<Rat> advanced(std::vector<Rat> p, const Rat& d) {
  for (Rat& c : p) c = c + d;
  return p;
}

std::vector<Rat> with_resets(std::vector<Rat> p, const std::vector<int>& cols) {
  for (int c : cols) p[static_cast<size_t>(c) - 1] = Rat(0);
  return p;
}

std::vector<TraceMove> merge_delays(const std::vector<TraceMove>& raw) {
  std::vector<TraceMove> out;
  for (const TraceMove& m : raw) {
    if (m.is_delay && !out.empty() && out.back().is_delay) {
      out.back().amount = out.back().amount + m.amount;
      continue;
    }
    out.push_back(m);
  }
  return out;
}

int count_zones(const StateSet& sets) {
  int n = 0;
  for (const Federation& f : sets) n += static_cast<int>(f.zones.size());
  return n;
}

// ---------------------------------------------------------------------------
// environment strategy extraction for an inconsistent spec
// ---------------------------------------------------------------------------

struct ConsistencyCex {
  const Spec& s;
  const InconsChain& ch;
  StateSet blocked;
  StateSet imerr;
  std::vector<TraceMove> trace;
  std::string reason;

  explicit ConsistencyCex(const Spec& spec, const InconsChain& chain)
      : s(spec), ch(chain), blocked(blocked_inputs(spec)), imerr(immediate_errors(spec)) {}

  void delay_move(const Rat& d) {
    if (d != Rat(0)) trace.push_back({true, d, ""});
  }
  void action_move(const std::string& a, bool input) {
    trace.push_back({false, Rat(0), a + (input ? "?" : "!")});
  }

  int level_of(int l, const std::vector<Rat>& p) const {
    for (size_t j = 1; j < ch.chain.size(); ++j)
      if (ch.chain[j][static_cast<size_t>(l)].contains(p)) return static_cast<int>(j);
    return -1;
  }

  void descend(int l, std::vector<Rat> p) {
    const Tioa& a = s.automaton();
    int level = level_of(l, p);
    if (level < 0) {
      reason = "internal: lost track of the environment strategy";
      return;
    }
    const StateSet& prev = ch.chain[static_cast<size_t>(level) - 1];

    StateSet errprev = error_states(s, prev);
    if (errprev[static_cast<size_t>(l)].contains(p)) {
      if (imerr[static_cast<size_t>(l)].contains(p)) {
        reason = "time is bounded at location '" + a.locations[static_cast<size_t>(l)].id +
                 "' and no output can become enabled";
        return;
      }
      // Every delay-reachable output lands in an already-lost state; follow
      // the earliest one.
      Prefix path = delay_prefix(s.invariant(l), p);
      std::optional<Rat> best;
      int best_edge = -1;
      for (int e : s.edges_from(l)) {
        if (!a.is_output(a.edges[static_cast<size_t>(e)].action)) continue;
        Federation into = s.edge_pre(e, prev[static_cast<size_t>(s.edge_target(e))]);
        auto d = pick_delay(clip_to_prefix(intervals_in(into, p), path));
        if (d && (!best || *d < *best)) {
          best = d;
          best_edge = e;
        }
      }
      if (!best) {
        reason = "internal: no escape found from an error state";
        return;
      }
      p = advanced(std::move(p), *best);
      delay_move(*best);
      const Edge& e = a.edges[static_cast<size_t>(best_edge)];
      action_move(e.action, false);
      descend(s.edge_target(best_edge), with_resets(std::move(p), a.reset_cols(e)));
      return;
    }

    // Attractor step: delay toward the lost set, an input into it, or a
    // blocked input, before any output can escape.
    Federation target = intersect(
        unite(unite(prev[static_cast<size_t>(l)], input_preds(s, l, prev)), blocked[static_cast<size_t>(l)]),
        s.admissible(l));
    Federation avoid = unite(output_escapes(s, l, prev), complement(s.invariant(l)));
    auto tivs = intervals_in(target, p);
    auto aivs = intervals_in(avoid, p);
    if (!aivs.empty()) tivs = clip_at_most(std::move(tivs), aivs.front().lo);
    auto d = pick_delay(tivs);
    if (!d) {
      reason = "internal: attractor step without a matching delay";
      return;
    }
    p = advanced(std::move(p), *d);
    delay_move(*d);

    for (int e : s.edges_from(l)) {
      const Edge& edge = a.edges[static_cast<size_t>(e)];
      if (!a.is_input(edge.action)) continue;
      if (!s.edge_pre(e, prev[static_cast<size_t>(s.edge_target(e))]).contains(p)) continue;
      action_move(edge.action, true);
      descend(s.edge_target(e), with_resets(std::move(p), a.reset_cols(edge)));
      return;
    }
    for (const std::string& in : a.inputs) {
      Federation covered = Federation::empty(a.clocks);
      for (int e : s.edges_from(l))
        if (a.edges[static_cast<size_t>(e)].action == in)
          covered = unite(std::move(covered), s.edge_enabled(e));
      if (!covered.contains(p)) {
        reason = "input '" + in + "' has no enabled edge at location '" +
                 a.locations[static_cast<size_t>(l)].id + "'";
        return;
      }
    }
    if (prev[static_cast<size_t>(l)].contains(p)) {
      descend(l, std::move(p));
      return;
    }
    reason = "internal: attractor landed outside every handle";
  }
};

Verdict consistency_of(const Spec& s, const InconsChain& ch) {
  Verdict v;
  v.iterations = ch.iterations();
  std::vector<Rat> zeros(s.automaton().clocks.size(), Rat(0));
  int l0 = s.initial_location();
  bool admissible_start = s.admissible(l0).contains(zeros);
  bool lost = !admissible_start || ch.fixpoint()[static_cast<size_t>(l0)].contains(zeros);
  if (!lost) {
    v.holds = true;
    for (int l = 0; l < s.location_count(); ++l) {
      Federation cons = subtract(s.admissible(l), ch.fixpoint()[static_cast<size_t>(l)]);
      v.symbolic_states += static_cast<int>(cons.zones.size());
      if (!cons.is_empty()) v.witness.push_back({s.location_id(l), "", to_string(cons)});
    }
    return v;
  }
  v.holds = false;
  v.symbolic_states = count_zones(ch.fixpoint());
  if (!admissible_start) {
    v.reason = "the zero valuation is not admissible at the initial location '" +
               s.location_id(l0) + "'";
    return v;
  }
  ConsistencyCex cex(s, ch);
  cex.descend(l0, zeros);
  v.counterexample = merge_delays(cex.trace);
  v.reason = cex.reason;
  return v;
}

}  // namespace

Verdict consistency(const Spec& s) { return consistency_of(s, inconsistent_chain(s)); }

bool is_locally_consistent(const Spec& s) {
  StateSet imerr = immediate_errors(s);
  for (const Federation& f : imerr)
    if (!f.is_empty()) return false;
  return true;
}

Verdict local_consistency_verdict(const Spec& s) {
  StateSet imerr = immediate_errors(s);
  Verdict v;
  v.iterations = 1;
  v.holds = true;
  for (int l = 0; l < s.location_count(); ++l) {
    const Federation& f = imerr[static_cast<size_t>(l)];
    if (f.is_empty()) continue;
    v.holds = false;
    if (v.reason.empty())
      v.reason = "location '" + s.location_id(l) +
                 "' lacks independent progress on " + to_string(f);
  }
  if (v.holds) {
    for (int l = 0; l < s.location_count(); ++l) {
      v.symbolic_states += static_cast<int>(s.admissible(l).zones.size());
      if (!s.admissible(l).is_empty())
        v.witness.push_back({s.location_id(l), "", to_string(s.admissible(l))});
    }
  } else {
    v.symbolic_states = count_zones(imerr);
  }
  return v;
}

Spec prune_adversarial(const Spec& s) {
  InconsChain ch = inconsistent_chain(s);
  Verdict v = consistency_of(s, ch);
  if (!v.holds)
    throw kit_error("precondition",
                    "cannot prune an inconsistent specification (" + v.reason + ")",
                    s.automaton().name);
  std::vector<Federation> cons;
  cons.reserve(static_cast<size_t>(s.location_count()));
  for (int l = 0; l < s.location_count(); ++l)
    cons.push_back(subtract(s.admissible(l), ch.fixpoint()[static_cast<size_t>(l)]));
  return Spec(s.automaton(), std::move(cons));
}

ImplementationReport is_implementation(const Spec& s) {
  const Tioa& a = s.automaton();
  ImplementationReport rep;

  for (int l = 0; l < s.location_count(); ++l) {
    for (const std::string& in : a.inputs) {
      Federation covered = Federation::empty(a.clocks);
      for (int e : s.edges_from(l))
        if (a.edges[static_cast<size_t>(e)].action == in)
          covered = unite(std::move(covered), s.edge_enabled(e));
      Federation gap = subtract(s.admissible(l), covered);
      if (!gap.is_empty())
        rep.issues.push_back({s.location_id(l), to_string(gap), "input enabledness"});
    }
  }

  for (int l = 0; l < s.location_count(); ++l) {
    // Where can strictly positive time pass? Start in the closure of an
    // invariant piece and slide strictly up into the part that can still
    // reach an admissible stop.
    Federation stops = bwd_closed(s.admissible(l), s.invariant(l));
    Federation pos = Federation::empty(a.clocks);
    for (const Dbm& z : s.invariant(l).zones) {
      Federation piece{s.invariant(l).clocks, {z}};
      pos = unite(std::move(pos),
                  intersect(closure(piece), down_strict(intersect(piece, stops))));
    }
    pos = intersect(std::move(pos), s.invariant(l));
    Federation urgent = intersect(intersect(s.output_enabled(l), s.admissible(l)), pos);
    if (!urgent.is_empty())
      rep.issues.push_back({s.location_id(l), to_string(urgent), "output urgency"});
  }

  StateSet imerr = immediate_errors(s);
  for (int l = 0; l < s.location_count(); ++l)
    if (!imerr[static_cast<size_t>(l)].is_empty())
      rep.issues.push_back(
          {s.location_id(l), to_string(imerr[static_cast<size_t>(l)]), "independent progress"});

  rep.ok = rep.issues.empty();
  return rep;
}

Verdict implementation_verdict(const Spec& s) {
  ImplementationReport rep = is_implementation(s);
  Verdict v;
  v.holds = rep.ok;
  v.iterations = 1;
  if (rep.ok) {
    for (int l = 0; l < s.location_count(); ++l) {
      v.symbolic_states += static_cast<int>(s.admissible(l).zones.size());
      if (!s.admissible(l).is_empty())
        v.witness.push_back({s.location_id(l), "", to_string(s.admissible(l))});
    }
    return v;
  }
  v.symbolic_states = static_cast<int>(rep.issues.size());
  for (const ImplementationIssue& i : rep.issues) {
    if (!v.reason.empty()) v.reason += "; ";
    v.reason += i.reason + " violated at location '" + i.location + "' on " + i.region;
  }
  return v;
}

// ---------------------------------------------------------------------------
// two-player games over the joint clock space
// ---------------------------------------------------------------------------

namespace {

enum class GameMode { refinement, bisimulation };

struct SideEdge {
  int src = -1;
  int tgt = -1;
  std::string action;
  bool input = false;
  Federation enabled;       // lifted to the joint space
  std::vector<int> resets;  // joint columns
};

struct Joint {
  const Spec& S;
  const Spec& T;
  int nS, nT;
  int cs, ct;
  std::vector<std::string> jclocks;
  std::vector<int> caps;
  std::vector<Federation> invS, invT, admS, admT;
  std::vector<std::vector<SideEdge>> from_s, from_t;
  std::set<std::string> in_s, out_s, in_t, out_t, act_s, act_t;

  int pair(int ls, int lt) const { return ls * nT + lt; }

  Joint(const Spec& s, const Spec& t) : S(s), T(t) {
    const Tioa& A = s.automaton();
    const Tioa& B = t.automaton();
    nS = s.location_count();
    nT = t.location_count();
    cs = static_cast<int>(A.clocks.size());
    ct = static_cast<int>(B.clocks.size());

    bool collide = false;
    for (const std::string& c : A.clocks)
      if (std::find(B.clocks.begin(), B.clocks.end(), c) != B.clocks.end()) collide = true;
    for (const std::string& c : A.clocks) jclocks.push_back(collide ? "left." + c : c);
    for (const std::string& c : B.clocks) jclocks.push_back(collide ? "right." + c : c);

    caps = A.clock_caps();
    std::vector<int> tcaps = B.clock_caps();
    caps.insert(caps.end(), tcaps.begin(), tcaps.end());

    auto lift_s = [&](const Federation& f) { return embed(f, 0, ct, jclocks); };
    auto lift_t = [&](const Federation& f) { return embed(f, cs, 0, jclocks); };
    for (int l = 0; l < nS; ++l) {
      invS.push_back(lift_s(s.invariant(l)));
      admS.push_back(lift_s(s.admissible(l)));
    }
    for (int l = 0; l < nT; ++l) {
      invT.push_back(lift_t(t.invariant(l)));
      admT.push_back(lift_t(t.admissible(l)));
    }

    from_s.resize(static_cast<size_t>(nS));
    for (int e = 0; e < s.edge_count(); ++e) {
      const Edge& edge = A.edges[static_cast<size_t>(e)];
      SideEdge se{s.edge_source(e), s.edge_target(e), edge.action, A.is_input(edge.action),
                  lift_s(s.edge_enabled(e)), A.reset_cols(edge)};
      from_s[static_cast<size_t>(se.src)].push_back(std::move(se));
    }
    from_t.resize(static_cast<size_t>(nT));
    for (int e = 0; e < t.edge_count(); ++e) {
      const Edge& edge = B.edges[static_cast<size_t>(e)];
      std::vector<int> cols = B.reset_cols(edge);
      for (int& c : cols) c += cs;
      SideEdge se{t.edge_source(e), t.edge_target(e), edge.action, B.is_input(edge.action),
                  lift_t(t.edge_enabled(e)), std::move(cols)};
      from_t[static_cast<size_t>(se.src)].push_back(std::move(se));
    }

    in_s = A.input_set();
    out_s = A.output_set();
    in_t = B.input_set();
    out_t = B.output_set();
    act_s = A.action_set();
    act_t = B.action_set();
  }
};

std::vector<int> merged_cols(std::vector<int> a, const std::vector<int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

// The mover fires `m`; the other side must fire an edge with the same action
// at the same instant, landing the joint state back in R.
Federation unanswered(const Joint& j, const std::vector<Federation>& R, const SideEdge& m,
                      bool mover_left, const std::vector<SideEdge>& answers) {
  Federation match = Federation::empty(j.jclocks);
  for (const SideEdge& ans : answers) {
    if (ans.action != m.action) continue;
    int p = mover_left ? j.pair(m.tgt, ans.tgt) : j.pair(ans.tgt, m.tgt);
    match = unite(std::move(match),
                  intersect(ans.enabled, pre_reset(R[static_cast<size_t>(p)],
                                                   merged_cols(m.resets, ans.resets))));
  }
  return subtract(m.enabled, match);
}

// The mover fires alone; the other side stays where it is.
Federation unescorted(const Joint& j, const std::vector<Federation>& R, const SideEdge& m,
                      bool mover_left, int ls, int lt) {
  int p = mover_left ? j.pair(m.tgt, lt) : j.pair(ls, m.tgt);
  return subtract(m.enabled, pre_reset(R[static_cast<size_t>(p)], m.resets));
}

// States where the left side has a legal delay the right side cannot copy:
// either the stop itself falls outside the right side's surviving states, or
// the right invariant already breaks somewhere on the way to a left stop.
// The second hazard does not depend on the surviving set, so it is split off
// for precomputation.
Federation delay_bad_static(const Joint& j, int ls, int lt, bool left_moves) {
  const Federation& invM = left_moves ? j.invS[static_cast<size_t>(ls)] : j.invT[static_cast<size_t>(lt)];
  const Federation& invO = left_moves ? j.invT[static_cast<size_t>(lt)] : j.invS[static_cast<size_t>(ls)];
  const Federation& admM = left_moves ? j.admS[static_cast<size_t>(ls)] : j.admT[static_cast<size_t>(lt)];
  Federation reach_stop = bwd_closed(admM, invM);
  return bwd_closed(intersect(subtract(invM, invO), std::move(reach_stop)), invM);
}

Federation delay_bad_dynamic(const Joint& j, const std::vector<Federation>& R, int ls, int lt,
                             bool left_moves) {
  const Federation& invM = left_moves ? j.invS[static_cast<size_t>(ls)] : j.invT[static_cast<size_t>(lt)];
  const Federation& admM = left_moves ? j.admS[static_cast<size_t>(ls)] : j.admT[static_cast<size_t>(lt)];
  const Federation& admO = left_moves ? j.admT[static_cast<size_t>(lt)] : j.admS[static_cast<size_t>(ls)];
  const Federation& r = R[static_cast<size_t>(j.pair(ls, lt))];
  return bwd_closed(subtract(admM, intersect(admO, r)), invM);
}

// `static_delay`, when given, carries the precomputed R-independent delay
// hazards for this pair so the fixpoint loop does not rebuild them each sweep.
Federation pair_bad(const Joint& j, GameMode mode, const std::vector<Federation>& R, int ls,
                    int lt, const Federation* static_delay = nullptr) {
  Federation bad = Federation::empty(j.jclocks);
  bool refine = mode == GameMode::refinement;

  for (const SideEdge& et : j.from_t[static_cast<size_t>(lt)]) {
    if (refine && !et.input) continue;
    bool shared = refine ? j.in_s.count(et.action) > 0 : j.act_s.count(et.action) > 0;
    if (shared)
      bad = unite(std::move(bad),
                  unanswered(j, R, et, false, j.from_s[static_cast<size_t>(ls)]));
    else
      bad = unite(std::move(bad), unescorted(j, R, et, false, ls, lt));
  }
  for (const SideEdge& es : j.from_s[static_cast<size_t>(ls)]) {
    if (refine && es.input) continue;
    bool shared = refine ? j.out_t.count(es.action) > 0 : j.act_t.count(es.action) > 0;
    if (shared)
      bad = unite(std::move(bad),
                  unanswered(j, R, es, true, j.from_t[static_cast<size_t>(lt)]));
    else
      bad = unite(std::move(bad), unescorted(j, R, es, true, ls, lt));
  }
  bad = unite(std::move(bad), delay_bad_dynamic(j, R, ls, lt, true));
  if (!refine) bad = unite(std::move(bad), delay_bad_dynamic(j, R, ls, lt, false));
  if (static_delay) {
    bad = unite(std::move(bad), *static_delay);
  } else {
    bad = unite(std::move(bad), delay_bad_static(j, ls, lt, true));
    if (!refine) bad = unite(std::move(bad), delay_bad_static(j, ls, lt, false));
  }
  return bad;
}

struct GameResult {
  std::vector<std::vector<Federation>> snaps;  // R per iteration, snaps[0] = start
  const std::vector<Federation>& final_r() const { return snaps.back(); }
  int iterations() const { return static_cast<int>(snaps.size()) - 1; }
};

GameResult solve(const Joint& j, GameMode mode) {
  size_t pairs = static_cast<size_t>(j.nS * j.nT);
  std::vector<Federation> r;
  r.reserve(pairs);
  for (int ls = 0; ls < j.nS; ++ls)
    for (int lt = 0; lt < j.nT; ++lt)
      r.push_back(intersect(j.admS[static_cast<size_t>(ls)], j.admT[static_cast<size_t>(lt)]));

  bool dbg = std::getenv("TIOA_GAME_DEBUG") != nullptr;
  if (dbg) std::fprintf(stderr, "[game] start pairs=%zu\n", pairs);

  // R-independent delay hazards, built once per pair.
  std::vector<Federation> static_delay;
  static_delay.reserve(pairs);
  for (int ls = 0; ls < j.nS; ++ls)
    for (int lt = 0; lt < j.nT; ++lt) {
      Federation f = delay_bad_static(j, ls, lt, true);
      if (mode != GameMode::refinement)
        f = unite(std::move(f), delay_bad_static(j, ls, lt, false));
      static_delay.push_back(std::move(f));
    }
  if (dbg) std::fprintf(stderr, "[game] statics done\n");

  // A pair's bad set reads the surviving sets of itself and of every pair the
  // two sides can land on in one step; anything else cannot change it. The
  // cross product of one-step landings is a safe over-approximation.
  std::vector<std::vector<int>> deps(pairs);
  for (int ls = 0; ls < j.nS; ++ls)
    for (int lt = 0; lt < j.nT; ++lt) {
      std::vector<int> s_land{ls}, t_land{lt};
      for (const SideEdge& e : j.from_s[static_cast<size_t>(ls)]) s_land.push_back(e.tgt);
      for (const SideEdge& e : j.from_t[static_cast<size_t>(lt)]) t_land.push_back(e.tgt);
      std::vector<int>& d = deps[static_cast<size_t>(j.pair(ls, lt))];
      for (int a : s_land)
        for (int b : t_land) d.push_back(j.pair(a, b));
      std::sort(d.begin(), d.end());
      d.erase(std::unique(d.begin(), d.end()), d.end());
    }

  GameResult g;
  g.snaps.push_back(r);
  std::vector<char> dirty(pairs, 1);
  for (;;) {
    std::vector<Federation> next = r;
    std::vector<char> dirty_next(pairs, 0);
    bool changed = false;
    for (size_t p = 0; p < pairs; ++p) {
      bool stale = false;
      for (int d : deps[p])
        if (dirty[static_cast<size_t>(d)]) {
          stale = true;
          break;
        }
      if (!stale) continue;  // every input is unchanged, so the result is too
      int ls = static_cast<int>(p) / j.nT;
      int lt = static_cast<int>(p) % j.nT;
      if (dbg) std::fprintf(stderr, "[game] pair %zu r_zones=%zu\n", p, r[p].zones.size());
      Federation kept = subtract(r[p], pair_bad(j, mode, r, ls, lt, &static_delay[p]));
      if (!subset_eq(r[p], kept)) {  // kept is a subset of r[p] by construction
        changed = true;
        dirty_next[p] = 1;
        next[p] = std::move(kept);
      }
    }
    if (!changed) break;
    r = next;
    g.snaps.push_back(std::move(next));
    dirty = std::move(dirty_next);
    if (std::getenv("TIOA_GAME_DEBUG")) {
      size_t zn = 0, dn = 0;
      for (const Federation& f : r) zn += f.zones.size();
      for (char c : dirty) dn += static_cast<size_t>(c);
      std::fprintf(stderr, "[game] iter=%zu zones=%zu dirty=%zu\n", g.snaps.size() - 1, zn, dn);
    }
  }
  return g;
}

// Joint states actually visited when both sides play the surviving relation.
std::vector<WitnessRow> joint_witness(const Joint& j, GameMode mode,
                                      const std::vector<Federation>& R) {
  bool refine = mode == GameMode::refinement;
  std::vector<Federation> seen(R.size(), Federation::empty(j.jclocks));
  int p0 = j.pair(j.S.initial_location(), j.T.initial_location());
  Federation start = intersect(Federation::zero_point(j.jclocks), R[static_cast<size_t>(p0)]);
  std::deque<std::pair<int, Federation>> waiting;
  waiting.emplace_back(p0, std::move(start));

  while (!waiting.empty()) {
    auto [p, fed] = std::move(waiting.front());
    waiting.pop_front();
    if (subset_eq(fed, seen[static_cast<size_t>(p)])) continue;
    int ls = p / j.nT, lt = p % j.nT;
    // Matched delays concatenate along the ray, so one closure application
    // is exhaustive: segments within both invariants, stops surviving on
    // both sides and inside the relation.
    Federation cur = intersect(
        fwd_closed(unite(std::move(fed), seen[static_cast<size_t>(p)]),
                   intersect(j.invS[static_cast<size_t>(ls)], j.invT[static_cast<size_t>(lt)])),
        intersect(R[static_cast<size_t>(p)],
                  intersect(j.admS[static_cast<size_t>(ls)], j.admT[static_cast<size_t>(lt)])));
    if (cur.is_empty()) continue;
    seen[static_cast<size_t>(p)] = cur;

    auto push = [&](int pn, Federation g) {
      if (g.is_empty()) return;
      g = intersect(extrapolate(std::move(g), j.caps), R[static_cast<size_t>(pn)]);
      if (g.is_empty() || subset_eq(g, seen[static_cast<size_t>(pn)])) return;
      waiting.emplace_back(pn, std::move(g));
    };

    for (const SideEdge& et : j.from_t[static_cast<size_t>(lt)]) {
      if (refine && !et.input) continue;
      bool shared = refine ? j.in_s.count(et.action) > 0 : j.act_s.count(et.action) > 0;
      if (shared) {
        for (const SideEdge& es : j.from_s[static_cast<size_t>(ls)]) {
          if (es.action != et.action) continue;
          push(j.pair(es.tgt, et.tgt),
               reset(intersect(intersect(cur, et.enabled), es.enabled),
                     merged_cols(es.resets, et.resets)));
        }
      } else {
        push(j.pair(ls, et.tgt), reset(intersect(cur, et.enabled), et.resets));
      }
    }
    for (const SideEdge& es : j.from_s[static_cast<size_t>(ls)]) {
      if (refine && es.input) continue;
      bool shared = refine ? j.out_t.count(es.action) > 0 : j.act_t.count(es.action) > 0;
      if (shared) {
        for (const SideEdge& et : j.from_t[static_cast<size_t>(lt)]) {
          if (et.action != es.action) continue;
          push(j.pair(es.tgt, et.tgt),
               reset(intersect(intersect(cur, es.enabled), et.enabled),
                     merged_cols(es.resets, et.resets)));
        }
      } else {
        push(j.pair(es.tgt, lt), reset(intersect(cur, es.enabled), es.resets));
      }
    }
  }

  std::vector<WitnessRow> rows;
  for (size_t p = 0; p < seen.size(); ++p) {
    if (seen[p].is_empty()) continue;
    int ls = static_cast<int>(p) / j.nT, lt = static_cast<int>(p) % j.nT;
    rows.push_back({j.S.location_id(ls), j.T.location_id(lt), to_string(seen[p])});
  }
  return rows;
}

struct GameCex {
  const Joint& j;
  const GameResult& g;
  GameMode mode;
  std::vector<TraceMove> trace;
  std::string reason;

  void delay_move(const Rat& d) {
    if (d != Rat(0)) trace.push_back({true, d, ""});
  }
  void action_move(const std::string& a, bool input) {
    trace.push_back({false, Rat(0), a + (input ? "?" : "!")});
  }

  std::string at_pair(int ls, int lt) const {
    return " (locations '" + j.S.location_id(ls) + "' and '" + j.T.location_id(lt) + "')";
  }

  // Largest k with q in snaps[k]; the obligations of snaps[k] are what q
  // violates.
  int level_of(int p, const std::vector<Rat>& q) const {
    int k = -1;
    while (k + 1 < static_cast<int>(g.snaps.size()) &&
           g.snaps[static_cast<size_t>(k + 1)][static_cast<size_t>(p)].contains(q))
      ++k;
    return k;
  }

  void descend(int ls, int lt, std::vector<Rat> q) {
    bool refine = mode == GameMode::refinement;
    int p = j.pair(ls, lt);
    int k = level_of(p, q);
    if (k < 0 || k + 1 >= static_cast<int>(g.snaps.size())) {
      reason = "internal: lost track of the distinguishing strategy";
      return;
    }
    const std::vector<Federation>& R = g.snaps[static_cast<size_t>(k)];

    for (const SideEdge& et : j.from_t[static_cast<size_t>(lt)]) {
      if (refine && !et.input) continue;
      if (!et.enabled.contains(q)) continue;
      bool shared = refine ? j.in_s.count(et.action) > 0 : j.act_s.count(et.action) > 0;
      if (!shared) {
        std::vector<Rat> succ = with_resets(q, et.resets);
        if (R[static_cast<size_t>(j.pair(ls, et.tgt))].contains(succ)) continue;
        action_move(et.action, et.input);
        descend(ls, et.tgt, std::move(succ));
        return;
      }
      bool answered = false;
      const SideEdge* first = nullptr;
      for (const SideEdge& es : j.from_s[static_cast<size_t>(ls)]) {
        if (es.action != et.action || !es.enabled.contains(q)) continue;
        if (!first) first = &es;
        if (R[static_cast<size_t>(j.pair(es.tgt, et.tgt))].contains(
                with_resets(q, merged_cols(es.resets, et.resets)))) {
          answered = true;
          break;
        }
      }
      if (answered) continue;
      if (!first) {
        reason = (et.input ? "input '" : "action '") + et.action +
                 "' of the right side has no enabled answer on the left" + at_pair(ls, lt);
        return;
      }
      action_move(et.action, et.input);
      descend(first->tgt, et.tgt, with_resets(q, merged_cols(first->resets, et.resets)));
      return;
    }

    for (const SideEdge& es : j.from_s[static_cast<size_t>(ls)]) {
      if (refine && es.input) continue;
      if (!es.enabled.contains(q)) continue;
      bool shared = refine ? j.out_t.count(es.action) > 0 : j.act_t.count(es.action) > 0;
      if (!shared) {
        std::vector<Rat> succ = with_resets(q, es.resets);
        if (R[static_cast<size_t>(j.pair(es.tgt, lt))].contains(succ)) continue;
        action_move(es.action, es.input);
        descend(es.tgt, lt, std::move(succ));
        return;
      }
      bool answered = false;
      const SideEdge* first = nullptr;
      for (const SideEdge& et : j.from_t[static_cast<size_t>(lt)]) {
        if (et.action != es.action || !et.enabled.contains(q)) continue;
        if (!first) first = &et;
        if (R[static_cast<size_t>(j.pair(es.tgt, et.tgt))].contains(
                with_resets(q, merged_cols(es.resets, et.resets)))) {
          answered = true;
          break;
        }
      }
      if (answered) continue;
      if (!first) {
        reason = (es.input ? "input '" : "output '") + es.action +
                 "' of the left side is not allowed by the right" + at_pair(ls, lt);
        return;
      }
      action_move(es.action, es.input);
      descend(es.tgt, first->tgt, with_resets(q, merged_cols(es.resets, first->resets)));
      return;
    }

    delay_descend(ls, lt, std::move(q), R);
  }

  void delay_descend(int ls, int lt, std::vector<Rat> q, const std::vector<Federation>& R) {
    // Try the left side's delays, then (for bisimulation) the right side's.
    for (int side = 0; side < 2; ++side) {
      bool left_moves = side == 0;
      if (!left_moves && mode == GameMode::refinement) break;
      const Federation& invM = left_moves ? j.invS[static_cast<size_t>(ls)] : j.invT[static_cast<size_t>(lt)];
      const Federation& invO = left_moves ? j.invT[static_cast<size_t>(lt)] : j.invS[static_cast<size_t>(ls)];
      const Federation& admM = left_moves ? j.admS[static_cast<size_t>(ls)] : j.admT[static_cast<size_t>(lt)];
      const Federation& admO = left_moves ? j.admT[static_cast<size_t>(lt)] : j.admS[static_cast<size_t>(ls)];
      const Federation& r = R[static_cast<size_t>(j.pair(ls, lt))];
      const char* other = left_moves ? "right" : "left";

      Prefix path = delay_prefix(invM, q);
      Federation stop_bad = subtract(admM, intersect(admO, r));
      if (auto d = pick_delay(clip_to_prefix(intervals_in(stop_bad, q), path))) {
        std::vector<Rat> q2 = advanced(q, *d);
        delay_move(*d);
        if (!invO.contains(q2)) {
          reason = std::string("after the delay the ") + other + " side's invariant fails" +
                   at_pair(ls, lt);
          return;
        }
        if (!admO.contains(q2)) {
          reason = std::string("after the delay the ") + other +
                   " side has no surviving state" + at_pair(ls, lt);
          return;
        }
        descend(ls, lt, std::move(q2));
        return;
      }

      Federation reach_stop = bwd_closed(admM, invM);
      Federation mid_bad = intersect(subtract(invM, invO), reach_stop);
      if (auto d1 = pick_delay(clip_to_prefix(intervals_in(mid_bad, q), path))) {
        std::vector<Rat> q1 = advanced(q, *d1);
        Prefix rest = delay_prefix(invM, q1);
        auto d2 = pick_delay(clip_to_prefix(intervals_in(admM, q1), rest));
        Rat total = d2 ? *d1 + *d2 : *d1;
        delay_move(total);
        reason = std::string("the ") + other + " side cannot match a delay of " + total.str() +
                 ": its invariant fails after " + d1->str() + at_pair(ls, lt);
        return;
      }
    }
    reason = "internal: no violated move found";
  }
};

void check_refinement_alphabets(const Tioa& s, const Tioa& t) {
  auto bail = [&](const std::string& what) {
    throw kit_error("precondition", what + " (left '" + s.name + "', right '" + t.name + "')");
  };
  for (const std::string& a : s.inputs)
    if (t.is_output(a)) bail("action '" + a + "' is an input on the left but an output on the right");
  for (const std::string& a : s.outputs)
    if (t.is_input(a)) bail("action '" + a + "' is an output on the left but an input on the right");
  for (const std::string& a : s.inputs)
    if (!t.is_input(a)) bail("input '" + a + "' of the left side is missing on the right");
  for (const std::string& a : t.outputs)
    if (!s.is_output(a)) bail("output '" + a + "' of the right side is missing on the left");
}

Verdict play_game(const Spec& s, const Spec& t, GameMode mode) {
  Joint j(s, t);
  GameResult g = solve(j, mode);
  const std::vector<Federation>& final_r = g.final_r();

  Verdict v;
  v.iterations = g.iterations();
  for (const Federation& f : final_r) v.symbolic_states += static_cast<int>(f.zones.size());

  std::vector<Rat> zeros(static_cast<size_t>(j.cs + j.ct), Rat(0));
  int p0 = j.pair(s.initial_location(), t.initial_location());
  if (final_r[static_cast<size_t>(p0)].contains(zeros)) {
    v.holds = true;
    v.witness = joint_witness(j, mode, final_r);
    return v;
  }
  v.holds = false;
  if (!g.snaps.front()[static_cast<size_t>(p0)].contains(zeros)) {
    v.reason = "the initial state is not admissible on both sides";
    return v;
  }
  GameCex cex{j, g, mode, {}, {}};
  cex.descend(s.initial_location(), t.initial_location(), zeros);
  v.counterexample = merge_delays(cex.trace);
  v.reason = cex.reason;
  return v;
}

}  // namespace

Verdict refinement(const Spec& s, const Spec& t) {
  check_refinement_alphabets(s.automaton(), t.automaton());
  return play_game(s, t, GameMode::refinement);
}

Verdict bisimilar(const Spec& s, const Spec& t) {
  return play_game(s, t, GameMode::bisimulation);
}

}  // namespace tioa
