#pragma once

#include <optional>
#include <string>
#include <vector>

#include "tioa/rational.hpp"

namespace tioa {

// A difference bound: the right-hand side of a constraint  x_i - x_j < c  or
// x_i - x_j <= c, or no constraint at all (infinity). Ordered by permissiveness,
// so (c, <) sorts just below (c, <=).
struct Bound {
  int value = 0;
  bool strict = false;
  bool inf = false;

  static Bound infinity() { return Bound{0, true, true}; }
  static Bound less_eq(int v) { return Bound{v, false, false}; }
  static Bound less(int v) { return Bound{v, true, false}; }
  static Bound zero() { return Bound{0, false, false}; }

  friend bool operator==(const Bound& a, const Bound& b) {
    if (a.inf || b.inf) return a.inf == b.inf;
    return a.value == b.value && a.strict == b.strict;
  }
};

bool bound_less(const Bound& a, const Bound& b);  // a more restrictive than b
Bound bound_min(const Bound& a, const Bound& b);
Bound bound_add(const Bound& a, const Bound& b);
// Right-hand side of the complementary constraint: the complement of
// x_i - x_j <= c is x_j - x_i < -c, and of a strict bound the non-strict flip.
Bound bound_negate(const Bound& b);
Bound bound_weaken(const Bound& b);   // drop strictness
Bound bound_sharpen(const Bound& b);  // make strict

// Difference bound matrix over clocks x_1..x_n plus the reference x_0 = 0.
// Entry (i,j) bounds x_i - x_j. Kept canonical (shortest-path closed) by the
// operations below; an empty zone is represented by canonicalize() failing.
class Dbm {
 public:
  explicit Dbm(int clocks);
  static Dbm zero_point(int clocks);

  int clocks() const { return dim_ - 1; }
  int dim() const { return dim_; }
  Bound& at(int i, int j) { return m_[static_cast<size_t>(i) * dim_ + j]; }
  const Bound& at(int i, int j) const { return m_[static_cast<size_t>(i) * dim_ + j]; }

  // Shortest-path closure; returns false when the constraint system is
  // infeasible (the zone is empty).
  bool canonicalize();

  bool contains(const std::vector<Rat>& point) const;

  void up();                                   // future: drop upper bounds
  void up_strict();                            // future reachable by a positive delay
  void down();                                 // past, clipped to the orthant
  void down_strict();                          // past reachable by a positive delay
  void close_bounds();                         // topological closure: all bounds non-strict
  void free_clock(int c);                      // forget every constraint on clock c
  void reset(const std::vector<int>& cols);    // clocks := 0
  bool constrain(int i, int j, const Bound& b);  // intersect with one constraint; false if empty
  void extrapolate(const std::vector<int>& caps);

  friend bool operator==(const Dbm& a, const Dbm& b) { return a.dim_ == b.dim_ && a.m_ == b.m_; }

 private:
  int dim_;
  std::vector<Bound> m_;
};

// Finite union of canonical non-empty zones over a shared ordered clock list.
// No normal form is maintained; semantic comparisons go through subtraction.
struct Federation {
  std::vector<std::string> clocks;
  std::vector<Dbm> zones;

  static Federation full(std::vector<std::string> clocks);
  static Federation empty(std::vector<std::string> clocks);
  static Federation zero_point(std::vector<std::string> clocks);

  bool is_empty() const { return zones.empty(); }
  bool contains(const std::vector<Rat>& point) const;
  void add(Dbm z);       // zone must already be canonical and non-empty
  void reduce();         // drop zones contained in another zone of the list
  void merge_reduce();   // reduce, then fuse zone pairs whose union is convex
};

// True when every bound of `inner` is at least as tight as the matching bound
// of `outer`, which puts inner's zone inside outer's. Complete (detects every
// inclusion) when `inner` is canonical.
bool zone_subsumed(const Dbm& inner, const Dbm& outer);

enum class SetRelation { equal, subset, superset, incomparable };

Federation up(const Federation& f);
Federation up_strict(const Federation& f);
Federation down(const Federation& f);
Federation down_strict(const Federation& f);
Federation closure(const Federation& f);
Federation reset(const Federation& f, const std::vector<int>& cols);
Federation pre_reset(const Federation& f, const std::vector<int>& cols);
Federation free_clock(const Federation& f, int col);
Federation intersect(const Federation& a, const Federation& b);
Federation unite(Federation a, const Federation& b);
Federation subtract(const Federation& a, const Federation& b);
Federation complement(const Federation& f);
SetRelation relation(const Federation& a, const Federation& b);
bool subset_eq(const Federation& a, const Federation& b);
bool same_set(const Federation& a, const Federation& b);
Federation extrapolate(const Federation& f, const std::vector<int>& caps);

// Embeds f into a wider clock space: `before` fresh unconstrained clocks are
// inserted ahead of f's own clocks and `after` behind; `clocks` names the
// widened space (size before + f.clocks.size() + after).
Federation embed(const Federation& f, int before, int after, std::vector<std::string> clocks);

// {v | exists d >= 0: v+d in good and v+d' not in bad for all d' in [0,d)}.
// The earliest stop inside `good` wins ties, so good-and-bad points are
// included via the zero delay.
Federation pred_t(const Federation& good, const Federation& bad);

// States reachable from `from` by letting time pass without ever leaving
// `within` (every intermediate point and the endpoint stay inside). Handles
// non-convex `within` by chaining across pieces whose closures touch.
Federation fwd_closed(const Federation& from, const Federation& within);

// States inside `within` that can reach `goal` by such a delay.
Federation bwd_closed(const Federation& goal, const Federation& within);

// Points of `within` from which some finite delay exits `within`.
Federation bounded_part(const Federation& within);

// Points whose entire future ray stays inside `within`.
Federation forever_part(const Federation& within);

std::string zone_to_string(const Dbm& z, const std::vector<std::string>& names);
std::string to_string(const Federation& f);

// Delays t with p + t inside the federation, as exact rational intervals
// sorted by lower endpoint.
struct DelayInterval {
  Rat lo;
  bool lo_strict = false;
  Rat hi;            // ignored when hi_inf
  bool hi_strict = false;
  bool hi_inf = false;
};
std::vector<DelayInterval> delay_intervals(const Federation& f, const std::vector<Rat>& p);

// A rational delay out of the first (smallest) interval: the closed lower
// endpoint when available, otherwise a midpoint a small step into the
// interval. Empty when no interval exists.
std::optional<Rat> pick_delay(const std::vector<DelayInterval>& ivs);

}  // namespace tioa
