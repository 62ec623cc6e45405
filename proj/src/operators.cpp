#include "tioa/operators.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "tioa/error.hpp"

namespace tioa {

namespace {

Tioa prefix_clocks(Tioa a, const std::string& prefix) {
  std::map<std::string, std::string> ren;
  for (std::string& c : a.clocks) {
    ren[c] = prefix + c;
    c = prefix + c;
  }
  for (Location& loc : a.locations) loc.invariant = rename_clocks(loc.invariant, ren);
  for (Edge& e : a.edges) {
    e.guard = rename_clocks(e.guard, ren);
    for (std::string& r : e.resets) r = ren.at(r);
  }
  return a;
}

// Leaves the operands alone when their clock lists are already disjoint.
void separate_clocks(Tioa& a1, Tioa& a2) {
  std::set<std::string> left(a1.clocks.begin(), a1.clocks.end());
  for (const std::string& c : a2.clocks) {
    if (!left.count(c)) continue;
    a1 = prefix_clocks(std::move(a1), "left.");
    a2 = prefix_clocks(std::move(a2), "right.");
    return;
  }
}

std::string pair_id(const std::string& a, const std::string& b) {
  return "(" + a + "," + b + ")";
}

std::vector<std::string> sorted_union(const std::vector<std::string>& a,
                                      const std::vector<std::string>& b) {
  std::set<std::string> s(a.begin(), a.end());
  s.insert(b.begin(), b.end());
  return {s.begin(), s.end()};
}

std::vector<std::string> sorted_difference(const std::vector<std::string>& a,
                                           const std::set<std::string>& minus) {
  std::set<std::string> s;
  for (const std::string& x : a)
    if (!minus.count(x)) s.insert(x);
  return {s.begin(), s.end()};
}

std::vector<std::string> concat(std::vector<std::string> a, const std::vector<std::string>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// The synchronized product shared by conjunction and composition: shared
// actions move both sides in lockstep, everything else interleaves. The two
// operators differ only in alphabet arithmetic and preconditions.
Tioa synchronized_product(const Tioa& a1, const Tioa& a2, std::vector<std::string> inputs,
                          std::vector<std::string> outputs, std::string name) {
  Tioa p;
  p.name = std::move(name);
  p.clocks = concat(a1.clocks, a2.clocks);
  p.inputs = std::move(inputs);
  p.outputs = std::move(outputs);

  std::set<std::string> act1 = a1.action_set();
  std::set<std::string> act2 = a2.action_set();

  for (const Location& l1 : a1.locations)
    for (const Location& l2 : a2.locations)
      p.locations.push_back({pair_id(l1.id, l2.id), g_and(l1.invariant, l2.invariant)});
  p.initial = a1.initial * static_cast<int>(a2.locations.size()) + a2.initial;

  auto push_edge = [&p](std::string src, const std::string& action, Guard guard,
                        std::vector<std::string> resets, std::string tgt) {
    if (guard.is_false()) return;
    p.edges.push_back({std::move(src), action, std::move(guard), std::move(resets), std::move(tgt)});
  };

  for (const Location& l1 : a1.locations) {
    for (const Location& l2 : a2.locations) {
      for (const Edge& e1 : a1.edges) {
        if (e1.source != l1.id) continue;
        if (act2.count(e1.action)) {
          for (const Edge& e2 : a2.edges) {
            if (e2.source != l2.id || e2.action != e1.action) continue;
            push_edge(pair_id(l1.id, l2.id), e1.action, g_and(e1.guard, e2.guard),
                      concat(e1.resets, e2.resets), pair_id(e1.target, e2.target));
          }
        } else {
          push_edge(pair_id(l1.id, l2.id), e1.action, e1.guard, e1.resets,
                    pair_id(e1.target, l2.id));
        }
      }
      for (const Edge& e2 : a2.edges) {
        if (e2.source != l2.id || act1.count(e2.action)) continue;
        push_edge(pair_id(l1.id, l2.id), e2.action, e2.guard, e2.resets,
                  pair_id(l1.id, e2.target));
      }
    }
  }
  return p;
}

// Product admissible regions for the carrier-level operators: the lift of each
// side's region into the shared clock space, intersected per product location.
std::vector<Federation> product_regions(const Spec& s1, const Spec& s2,
                                        const std::vector<std::string>& clocks) {
  int n1 = static_cast<int>(s1.automaton().clocks.size());
  int n2 = static_cast<int>(s2.automaton().clocks.size());
  std::vector<Federation> out;
  for (int l1 = 0; l1 < s1.location_count(); ++l1) {
    Federation left = embed(s1.admissible(l1), 0, n2, clocks);
    for (int l2 = 0; l2 < s2.location_count(); ++l2)
      out.push_back(intersect(left, embed(s2.admissible(l2), n1, 0, clocks)));
  }
  return out;
}

std::string fresh_name(std::string base, const std::set<std::string>& taken) {
  std::string name = base;
  for (int k = 2; taken.count(name); ++k) name = base + std::to_string(k);
  return name;
}

}  // namespace

Tioa conjunction(const Tioa& a1, const Tioa& a2) {
  for (const std::string& a : a1.inputs)
    if (a2.is_output(a))
      throw kit_error("precondition",
                      "conjunction needs matching roles: '" + a + "' is an input of " + a1.name +
                          " but an output of " + a2.name,
                      a1.name + " && " + a2.name);
  for (const std::string& a : a1.outputs)
    if (a2.is_input(a))
      throw kit_error("precondition",
                      "conjunction needs matching roles: '" + a + "' is an output of " + a1.name +
                          " but an input of " + a2.name,
                      a1.name + " && " + a2.name);
  Tioa left = a1, right = a2;
  separate_clocks(left, right);
  return synchronized_product(left, right, sorted_union(a1.inputs, a2.inputs),
                              sorted_union(a1.outputs, a2.outputs),
                              "(" + a1.name + " && " + a2.name + ")");
}

Tioa composition(const Tioa& a1, const Tioa& a2) {
  for (const std::string& a : a1.outputs)
    if (a2.is_output(a))
      throw kit_error("precondition",
                      "not composable: '" + a + "' is an output of both " + a1.name + " and " +
                          a2.name,
                      a1.name + " || " + a2.name);
  Tioa left = a1, right = a2;
  separate_clocks(left, right);
  std::vector<std::string> inputs =
      sorted_union(sorted_difference(a1.inputs, a2.output_set()),
                   sorted_difference(a2.inputs, a1.output_set()));
  return synchronized_product(left, right, std::move(inputs),
                              sorted_union(a1.outputs, a2.outputs),
                              "(" + a1.name + " || " + a2.name + ")");
}

Tioa quotient(const Tioa& t, const Tioa& s) {
  for (const std::string& a : s.outputs)
    if (t.is_input(a))
      throw kit_error("precondition",
                      "quotient needs '" + a + "' not to be both an output of " + s.name +
                          " and an input of " + t.name,
                      t.name + " \\\\ " + s.name);

  Tioa T = t, S = s;
  separate_clocks(T, S);
  std::set<std::string> all_actions = t.action_set();
  for (const std::string& a : s.action_set()) all_actions.insert(a);
  const std::string i_new = fresh_name("i_new", all_actions);
  std::set<std::string> all_clocks(T.clocks.begin(), T.clocks.end());
  all_clocks.insert(S.clocks.begin(), S.clocks.end());
  const std::string x_new = fresh_name("x_new", all_clocks);

  std::set<std::string> shared_out;
  for (const std::string& a : t.outputs)
    if (s.is_output(a)) shared_out.insert(a);

  Tioa q;
  q.name = "(" + t.name + " \\\\ " + s.name + ")";
  q.clocks = concat(concat(T.clocks, S.clocks), {x_new});
  q.inputs = sorted_union(sorted_union(t.inputs, s.outputs), {i_new});
  q.outputs = sorted_union(sorted_difference(t.outputs, s.output_set()),
                           sorted_difference(s.inputs, t.input_set()));

  const std::string univ = "l_univ";
  const std::string err = "l_err";
  for (const Location& lt : T.locations)
    for (const Location& ls : S.locations) q.locations.push_back({pair_id(lt.id, ls.id), Guard::truth()});
  q.initial = T.initial * static_cast<int>(S.locations.size()) + S.initial;
  q.locations.push_back({univ, Guard::truth()});
  q.locations.push_back({err, Guard::atom(x_new, Guard::Rel::le, 0)});

  std::set<std::string> act_t = t.action_set();
  std::set<std::string> act_s = s.action_set();
  std::vector<std::string> quotient_actions = sorted_union(q.inputs, q.outputs);

  auto inv_after = [](const Location& loc, const std::vector<std::string>& resets) {
    return substitute_zero(loc.invariant, {resets.begin(), resets.end()});
  };
  auto push_edge = [&q](std::string src, const std::string& action, Guard guard,
                        std::vector<std::string> resets, std::string tgt) {
    if (guard.is_false()) return;
    q.edges.push_back({std::move(src), action, std::move(guard), std::move(resets), std::move(tgt)});
  };

  for (const Location& lt : T.locations) {
    for (const Location& ls : S.locations) {
      const std::string here = pair_id(lt.id, ls.id);

      // Shared actions advance both sides; the operand invariants move into
      // the guard because product locations carry none.
      for (const Edge& et : T.edges) {
        if (et.source != lt.id || !act_s.count(et.action)) continue;
        for (const Edge& es : S.edges) {
          if (es.source != ls.id || es.action != et.action) continue;
          Guard g = g_and(g_and(g_and(g_and(et.guard, inv_after(T.locations[T.loc_index(et.target)], et.resets)),
                                      es.guard),
                                ls.invariant),
                          inv_after(S.locations[S.loc_index(es.target)], es.resets));
          push_edge(here, et.action, std::move(g), concat(et.resets, es.resets),
                    pair_id(et.target, es.target));
        }
      }

      // Actions private to the denominator advance it alone.
      for (const Edge& es : S.edges) {
        if (es.source != ls.id || act_t.count(es.action)) continue;
        Guard g = g_and(g_and(es.guard, ls.invariant),
                        inv_after(S.locations[S.loc_index(es.target)], es.resets));
        push_edge(here, es.action, std::move(g), es.resets, pair_id(lt.id, es.target));
      }

      // Where the denominator refuses one of its own outputs, everything is
      // permitted afterwards.
      for (const std::string& a : s.outputs) {
        Guard gs = Guard::falsity();
        for (const Edge& es : S.edges) {
          if (es.source != ls.id || es.action != a) continue;
          gs = g_or(std::move(gs),
                    g_and(es.guard, inv_after(S.locations[S.loc_index(es.target)], es.resets)));
        }
        push_edge(here, a, g_not(std::move(gs)), {}, univ);
      }

      // Outside the denominator's invariant everything is permitted too. The
      // fresh input stays out of this rule: its own two edges below already
      // cover every valuation, and a third would break determinism.
      for (const std::string& a : quotient_actions)
        if (a != i_new) push_edge(here, a, g_not(ls.invariant), {}, univ);

      // Denominator outputs the numerator cannot match land in the
      // inconsistent location.
      for (const std::string& a : s.outputs) {
        if (!shared_out.count(a)) continue;
        Guard gt = Guard::falsity();
        for (const Edge& et : T.edges) {
          if (et.source != lt.id || et.action != a) continue;
          gt = g_or(std::move(gt),
                    g_and(et.guard, inv_after(T.locations[T.loc_index(et.target)], et.resets)));
        }
        for (const Edge& es : S.edges) {
          if (es.source != ls.id || es.action != a) continue;
          Guard g = g_and(g_and(g_and(es.guard, ls.invariant),
                                inv_after(S.locations[S.loc_index(es.target)], es.resets)),
                          g_not(gt));
          push_edge(here, a, std::move(g), {x_new}, err);
        }
      }

      // Fresh input: inconsistent where only the denominator can stay, a
      // self-loop everywhere else keeps the quotient input-enabled for it.
      push_edge(here, i_new, g_and(g_not(lt.invariant), ls.invariant), {x_new}, err);
      push_edge(here, i_new, g_or(lt.invariant, g_not(ls.invariant)), {}, here);

      // Actions private to the numerator advance it alone, inside the
      // denominator's invariant to stay clear of the universal edges.
      for (const Edge& et : T.edges) {
        if (et.source != lt.id || act_s.count(et.action)) continue;
        Guard g = g_and(g_and(et.guard, inv_after(T.locations[T.loc_index(et.target)], et.resets)),
                        ls.invariant);
        push_edge(here, et.action, std::move(g), et.resets, pair_id(et.target, ls.id));
      }
    }
  }

  for (const std::string& a : quotient_actions) push_edge(univ, a, Guard::truth(), {}, univ);
  for (const std::string& a : q.inputs)
    push_edge(err, a, Guard::atom(x_new, Guard::Rel::eq, 0), {}, err);

  return q;
}

Spec conjunction(const Spec& s1, const Spec& s2) {
  Tioa prod = conjunction(s1.automaton(), s2.automaton());
  if (!s1.is_pruned() && !s2.is_pruned()) return Spec(std::move(prod));
  std::vector<Federation> regions = product_regions(s1, s2, prod.clocks);
  return Spec(std::move(prod), std::move(regions));
}

Spec composition(const Spec& s1, const Spec& s2) {
  Tioa prod = composition(s1.automaton(), s2.automaton());
  if (!s1.is_pruned() && !s2.is_pruned()) return Spec(std::move(prod));
  std::vector<Federation> regions = product_regions(s1, s2, prod.clocks);
  return Spec(std::move(prod), std::move(regions));
}

Spec quotient(const Spec& t, const Spec& s) {
  if (t.is_pruned() || s.is_pruned())
    throw kit_error("precondition",
                    "quotient operands must be unpruned automata; apply prune() to the quotient "
                    "instead",
                    t.automaton().name + " \\\\ " + s.automaton().name);
  return Spec(quotient(t.automaton(), s.automaton()));
}

Spec cooperative_pruning(Spec s) { return s; }

}  // namespace tioa
