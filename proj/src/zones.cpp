#include "tioa/zones.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>
#include <stdexcept>

namespace tioa {

bool bound_less(const Bound& a, const Bound& b) {
  if (a.inf) return false;
  if (b.inf) return true;
  if (a.value != b.value) return a.value < b.value;
  return a.strict && !b.strict;
}

Bound bound_min(const Bound& a, const Bound& b) { return bound_less(a, b) ? a : b; }

Bound bound_add(const Bound& a, const Bound& b) {
  if (a.inf || b.inf) return Bound::infinity();
  return Bound{a.value + b.value, a.strict || b.strict, false};
}

Bound bound_negate(const Bound& b) {
  assert(!b.inf);
  return Bound{-b.value, !b.strict, false};
}

Bound bound_weaken(const Bound& b) {
  if (b.inf) return b;
  return Bound{b.value, false, false};
}

Bound bound_sharpen(const Bound& b) {
  if (b.inf) return b;
  return Bound{b.value, true, false};
}

Dbm::Dbm(int clocks) : dim_(clocks + 1), m_(static_cast<size_t>(dim_) * dim_, Bound::infinity()) {
  for (int i = 0; i < dim_; ++i) at(i, i) = Bound::zero();
  for (int j = 1; j < dim_; ++j) at(0, j) = Bound::zero();  // clocks are non-negative
}

Dbm Dbm::zero_point(int clocks) {
  Dbm z(clocks);
  for (int i = 0; i < z.dim_; ++i)
    for (int j = 0; j < z.dim_; ++j) z.at(i, j) = Bound::zero();
  return z;
}

bool Dbm::canonicalize() {
  for (int k = 0; k < dim_; ++k)
    for (int i = 0; i < dim_; ++i) {
      if (at(i, k).inf) continue;
      for (int j = 0; j < dim_; ++j) {
        Bound via = bound_add(at(i, k), at(k, j));
        if (bound_less(via, at(i, j))) at(i, j) = via;
      }
    }
  for (int i = 0; i < dim_; ++i)
    if (bound_less(at(i, i), Bound::zero())) return false;
  return true;
}

bool Dbm::contains(const std::vector<Rat>& point) const {
  assert(static_cast<int>(point.size()) == clocks());
  auto coord = [&](int i) { return i == 0 ? Rat(0) : point[static_cast<size_t>(i) - 1]; };
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      const Bound& b = at(i, j);
      if (b.inf) continue;
      Rat diff = coord(i) - coord(j);
      if (b.strict ? !(diff < Rat(b.value)) : !(diff <= Rat(b.value))) return false;
    }
  return true;
}

void Dbm::up() {
  for (int i = 1; i < dim_; ++i) at(i, 0) = Bound::infinity();
}

void Dbm::down() {
  // Lower bounds relax toward zero but stay limited by the difference rows:
  // 0 - x_i <= x_j - x_i whenever x_j >= 0.
  for (int i = 1; i < dim_; ++i) {
    Bound lo = Bound::zero();
    for (int j = 1; j < dim_; ++j)
      if (j != i) lo = bound_min(lo, at(j, i));
    at(0, i) = lo;
  }
  canonicalize();
}

void Dbm::up_strict() {
  // {v | exists d > 0 with v - d in this zone}: the mirror of down_strict.
  for (int i = 1; i < dim_; ++i) {
    at(i, 0) = Bound::infinity();
    at(0, i) = bound_sharpen(at(0, i));
  }
}

void Dbm::down_strict() {
  // {v | exists d > 0 with v + d in this zone}: differences persist, upper
  // bounds become strict, lower bounds relax to the orthant.
  for (int i = 1; i < dim_; ++i) {
    at(0, i) = Bound::zero();
    at(i, 0) = bound_sharpen(at(i, 0));
  }
}

void Dbm::close_bounds() {
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      if (i != j) at(i, j) = bound_weaken(at(i, j));
}

void Dbm::free_clock(int c) {
  assert(c >= 1 && c < dim_);
  for (int j = 0; j < dim_; ++j) {
    if (j == c) continue;
    at(c, j) = Bound::infinity();
    at(j, c) = at(j, 0);
  }
}

void Dbm::reset(const std::vector<int>& cols) {
  for (int c : cols) {
    assert(c >= 1 && c < dim_);
    for (int j = 0; j < dim_; ++j) {
      if (j == c) continue;
      at(c, j) = at(0, j);
      at(j, c) = at(j, 0);
    }
  }
}

bool Dbm::constrain(int i, int j, const Bound& b) {
  if (bound_less(b, at(i, j))) {
    at(i, j) = b;
    return canonicalize();
  }
  return true;
}

void Dbm::extrapolate(const std::vector<int>& caps) {
  assert(static_cast<int>(caps.size()) == clocks());
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j) {
      if (i == j) continue;
      Bound& b = at(i, j);
      if (b.inf) continue;
      if (i >= 1 && b.value > caps[static_cast<size_t>(i) - 1]) {
        b = Bound::infinity();
      } else if (j >= 1 && b.value < -caps[static_cast<size_t>(j) - 1]) {
        b = Bound::less(-caps[static_cast<size_t>(j) - 1]);
      }
    }
  canonicalize();
}

Federation Federation::full(std::vector<std::string> clocks) {
  Federation f;
  f.clocks = std::move(clocks);
  Dbm z(static_cast<int>(f.clocks.size()));
  z.canonicalize();
  f.zones.push_back(std::move(z));
  return f;
}

Federation Federation::empty(std::vector<std::string> clocks) {
  Federation f;
  f.clocks = std::move(clocks);
  return f;
}

Federation Federation::zero_point(std::vector<std::string> clocks) {
  Federation f;
  f.clocks = std::move(clocks);
  f.zones.push_back(Dbm::zero_point(static_cast<int>(f.clocks.size())));
  return f;
}

bool Federation::contains(const std::vector<Rat>& point) const {
  for (const Dbm& z : zones)
    if (z.contains(point)) return true;
  return false;
}

void Federation::add(Dbm z) { zones.push_back(std::move(z)); }

bool zone_subsumed(const Dbm& inner, const Dbm& outer) {
  assert(inner.dim() == outer.dim());
  for (int i = 0; i < inner.dim(); ++i)
    for (int j = 0; j < inner.dim(); ++j)
      if (i != j && bound_less(outer.at(i, j), inner.at(i, j))) return false;
  return true;
}

void Federation::reduce() {
  if (zones.size() < 2) return;
  std::vector<char> drop(zones.size(), 0);
  for (size_t i = 0; i < zones.size(); ++i)
    for (size_t k = 0; k < zones.size(); ++k) {
      if (k == i || !zone_subsumed(zones[i], zones[k])) continue;
      // On mutual inclusion keep only the first of the equal zones.
      if (k < i || !zone_subsumed(zones[k], zones[i])) {
        drop[i] = 1;
        break;
      }
    }
  std::vector<Dbm> kept;
  kept.reserve(zones.size());
  for (size_t i = 0; i < zones.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(zones[i]));
  zones = std::move(kept);
}

namespace {

void check_same_clocks(const Federation& a, const Federation& b) {
  if (a.clocks != b.clocks) throw std::invalid_argument("federation clock lists differ");
}

Federation map_zones(const Federation& f, void (Dbm::*op)()) {
  Federation out = Federation::empty(f.clocks);
  for (Dbm z : f.zones) {
    (z.*op)();
    if (z.canonicalize()) out.add(std::move(z));
  }
  return out;
}

// All finite off-diagonal constraints of a canonical zone, used to split a
// subtrahend into complementary half-spaces.
std::vector<std::pair<std::pair<int, int>, Bound>> facet_constraints(const Dbm& z) {
  std::vector<std::pair<std::pair<int, int>, Bound>> out;
  for (int i = 0; i < z.dim(); ++i)
    for (int j = 0; j < z.dim(); ++j) {
      if (i == j) continue;
      const Bound& b = z.at(i, j);
      if (b.inf) continue;
      if (i == 0 && b == Bound::zero()) continue;  // orthant bound, complement is empty
      out.push_back({{i, j}, b});
    }
  return out;
}

std::vector<Dbm> subtract_zone(const Dbm& a, const Dbm& b) {
  std::vector<Dbm> pieces;
  if (zone_subsumed(a, b)) return pieces;
  Dbm rest = a;  // a intersected with the b-constraints handled so far
  bool rest_nonempty = true;
  for (const auto& [ij, bound] : facet_constraints(b)) {
    if (!rest_nonempty) break;
    Dbm piece = rest;
    if (piece.constrain(ij.second, ij.first, bound_negate(bound))) pieces.push_back(std::move(piece));
    rest_nonempty = rest.constrain(ij.first, ij.second, bound);
  }
  return pieces;
}

// Whether any point of za survives removal of every zone in b, without
// materializing the difference.
bool zone_escapes(const Dbm& za, const std::vector<Dbm>& b) {
  std::vector<Dbm> pieces{za};
  for (const Dbm& zb : b) {
    std::vector<Dbm> next;
    for (const Dbm& piece : pieces)
      for (Dbm& split : subtract_zone(piece, zb)) next.push_back(std::move(split));
    pieces = std::move(next);
    if (pieces.empty()) return false;
  }
  return true;
}

}  // namespace

Federation up(const Federation& f) { return map_zones(f, &Dbm::up); }

Federation up_strict(const Federation& f) { return map_zones(f, &Dbm::up_strict); }

Federation down(const Federation& f) {
  Federation out = Federation::empty(f.clocks);
  for (Dbm z : f.zones) {
    z.down();
    out.add(std::move(z));  // down keeps non-emptiness
  }
  return out;
}

Federation down_strict(const Federation& f) { return map_zones(f, &Dbm::down_strict); }

Federation closure(const Federation& f) { return map_zones(f, &Dbm::close_bounds); }

Federation reset(const Federation& f, const std::vector<int>& cols) {
  Federation out = Federation::empty(f.clocks);
  for (Dbm z : f.zones) {
    z.reset(cols);
    if (z.canonicalize()) out.add(std::move(z));
  }
  return out;
}

Federation pre_reset(const Federation& f, const std::vector<int>& cols) {
  // {v | v[cols := 0] in f}: pin the clocks to zero, then forget them.
  Federation out = Federation::empty(f.clocks);
  for (Dbm z : f.zones) {
    bool ok = true;
    for (int c : cols)
      if (!z.constrain(c, 0, Bound::zero()) || !z.constrain(0, c, Bound::zero())) {
        ok = false;
        break;
      }
    if (!ok) continue;
    for (int c : cols) z.free_clock(c);
    if (z.canonicalize()) out.add(std::move(z));
  }
  return out;
}

Federation free_clock(const Federation& f, int col) {
  Federation out = Federation::empty(f.clocks);
  for (Dbm z : f.zones) {
    z.free_clock(col);
    if (z.canonicalize()) out.add(std::move(z));
  }
  return out;
}

Federation intersect(const Federation& a, const Federation& b) {
  check_same_clocks(a, b);
  Federation out = Federation::empty(a.clocks);
  for (const Dbm& za : a.zones)
    for (const Dbm& zb : b.zones) {
      Dbm z = za;
      bool ok = true;
      for (int i = 0; ok && i < z.dim(); ++i)
        for (int j = 0; j < z.dim(); ++j)
          if (bound_less(zb.at(i, j), z.at(i, j))) z.at(i, j) = zb.at(i, j);
      if (z.canonicalize()) out.add(std::move(z));
    }
  return out;
}

Federation unite(Federation a, const Federation& b) {
  check_same_clocks(a, b);
  for (const Dbm& z : b.zones) a.add(z);
  a.reduce();
  return a;
}

Federation subtract(const Federation& a, const Federation& b) {
  check_same_clocks(a, b);
  Federation out = Federation::empty(a.clocks);
  out.zones = a.zones;
  for (const Dbm& zb : b.zones) {
    std::vector<Dbm> next;
    for (const Dbm& za : out.zones)
      for (Dbm& piece : subtract_zone(za, zb)) next.push_back(std::move(piece));
    out.zones = std::move(next);
    if (out.zones.empty()) break;
    out.merge_reduce();  // keep intermediate shattering in check
  }
  return out;
}

// Fuse pairs of zones whose convex hull adds no new points; subtraction
// shatters sets into slivers, and without refusing that representation the
// fixpoints over federations grow far beyond the sets they describe.
void Federation::merge_reduce() {
  reduce();
  for (bool merged = true; merged;) {
    merged = false;
    for (size_t i = 0; i < zones.size() && !merged; ++i)
      for (size_t k = i + 1; k < zones.size() && !merged; ++k) {
        Dbm hull = zones[i];
        for (int a = 0; a < hull.dim(); ++a)
          for (int b = 0; b < hull.dim(); ++b)
            if (bound_less(hull.at(a, b), zones[k].at(a, b))) hull.at(a, b) = zones[k].at(a, b);
        if (!hull.canonicalize()) continue;
        bool covered = true;
        for (Dbm& piece : subtract_zone(hull, zones[i]))
          if (!subtract_zone(piece, zones[k]).empty()) {
            covered = false;
            break;
          }
        if (!covered) continue;
        zones[i] = std::move(hull);
        zones.erase(zones.begin() + static_cast<std::ptrdiff_t>(k));
        merged = true;
      }
  }
  reduce();  // a fused hull may swallow zones that survived the first pass
}

Federation complement(const Federation& f) { return subtract(Federation::full(f.clocks), f); }

SetRelation relation(const Federation& a, const Federation& b) {
  bool le = subtract(a, b).is_empty();
  bool ge = subtract(b, a).is_empty();
  if (le && ge) return SetRelation::equal;
  if (le) return SetRelation::subset;
  if (ge) return SetRelation::superset;
  return SetRelation::incomparable;
}

bool subset_eq(const Federation& a, const Federation& b) { return subtract(a, b).is_empty(); }

bool same_set(const Federation& a, const Federation& b) {
  return subset_eq(a, b) && subset_eq(b, a);
}

Federation extrapolate(const Federation& f, const std::vector<int>& caps) {
  Federation out = Federation::empty(f.clocks);
  for (Dbm z : f.zones) {
    z.extrapolate(caps);
    out.add(std::move(z));
  }
  return out;
}

Federation embed(const Federation& f, int before, int after, std::vector<std::string> clocks) {
  const int n = static_cast<int>(f.clocks.size());
  Federation out = Federation::empty(std::move(clocks));
  for (const Dbm& z : f.zones) {
    Dbm wide(before + n + after);
    auto col = [before](int i) { return i == 0 ? 0 : i + before; };
    for (int i = 0; i <= n; ++i)
      for (int j = 0; j <= n; ++j) wide.at(col(i), col(j)) = z.at(i, j);
    wide.canonicalize();
    out.add(std::move(wide));
  }
  return out;
}

namespace {

// One backward chaining step through a single convex piece Z: the points p in
// cl(Z) with some target q = p + d (d > 0) already in w and on cl(Z), whose
// open run-up (p, q) stays inside Z. By convexity that holds exactly when the
// midpoint lies in Z, which the nested strict-past operators encode.
Federation slide_down_through(const Federation& w, const Dbm& z) {
  Federation fz = Federation::empty(w.clocks);
  fz.add(z);
  Federation clz = closure(fz);
  Federation targets = down_strict(intersect(w, clz));
  return intersect(down_strict(intersect(std::move(targets), fz)), clz);
}

// The forward mirror: points p = q + d (d > 0) with q in w on cl(Z) and the
// open segment (q, p) inside Z.
Federation slide_up_through(const Federation& w, const Dbm& z) {
  Federation fz = Federation::empty(w.clocks);
  fz.add(z);
  Federation clz = closure(fz);
  Federation sources = up_strict(intersect(w, clz));
  return intersect(up_strict(intersect(std::move(sources), fz)), clz);
}

}  // namespace

Federation pred_t(const Federation& good, const Federation& bad) {
  check_same_clocks(good, bad);
  // Chain backwards through the convex pieces of the bad-complement. A point
  // qualifies by stopping inside `good` immediately (d = 0, no avoidance
  // obligation) or by running through one piece toward an already qualified
  // stop; handoffs between pieces happen at shared closure points, which may
  // belong to either piece.
  Federation safe = complement(bad);
  Federation w = good;
  for (;;) {
    Federation grow = Federation::empty(good.clocks);
    for (const Dbm& z : safe.zones) grow = unite(std::move(grow), slide_down_through(w, z));
    grow = intersect(std::move(grow), safe);
    Federation added = subtract(grow, w);
    if (added.is_empty()) break;
    w = unite(std::move(w), added);
  }
  return w;
}

Federation fwd_closed(const Federation& from, const Federation& within) {
  check_same_clocks(from, within);
  Federation w = intersect(from, within);
  for (;;) {
    Federation grow = Federation::empty(from.clocks);
    for (const Dbm& z : within.zones) grow = unite(std::move(grow), slide_up_through(w, z));
    grow = intersect(std::move(grow), within);
    Federation added = subtract(grow, w);
    if (added.is_empty()) break;
    w = unite(std::move(w), added);
  }
  return w;
}

Federation bwd_closed(const Federation& goal, const Federation& within) {
  check_same_clocks(goal, within);
  Federation w = intersect(goal, within);
  for (;;) {
    Federation grow = Federation::empty(goal.clocks);
    for (const Dbm& z : within.zones) grow = unite(std::move(grow), slide_down_through(w, z));
    grow = intersect(std::move(grow), within);
    Federation added = subtract(grow, w);
    if (added.is_empty()) break;
    w = unite(std::move(w), added);
  }
  return w;
}

Federation bounded_part(const Federation& within) {
  return intersect(within, down(complement(within)));
}

Federation forever_part(const Federation& within) {
  return subtract(within, down(complement(within)));
}

std::string zone_to_string(const Dbm& z, const std::vector<std::string>& names) {
  auto name = [&](int i) { return names[static_cast<size_t>(i) - 1]; };
  std::ostringstream out;
  bool first = true;
  auto emit = [&](const std::string& text) {
    if (!first) out << " && ";
    out << text;
    first = false;
  };
  for (int i = 1; i < z.dim(); ++i) {
    const Bound& lo = z.at(0, i);
    const Bound& hi = z.at(i, 0);
    if (!(lo == Bound::zero()))
      emit(name(i) + (lo.strict ? ">" : ">=") + std::to_string(-lo.value));
    if (!hi.inf) emit(name(i) + (hi.strict ? "<" : "<=") + std::to_string(hi.value));
  }
  for (int i = 1; i < z.dim(); ++i)
    for (int j = 1; j < z.dim(); ++j) {
      if (i == j) continue;
      const Bound& b = z.at(i, j);
      if (b.inf) continue;
      emit(name(i) + "-" + name(j) + (b.strict ? "<" : "<=") + std::to_string(b.value));
    }
  if (first) return "true";
  return out.str();
}

std::string to_string(const Federation& f) {
  if (f.zones.empty()) return "false";
  std::vector<std::string> parts;
  parts.reserve(f.zones.size());
  for (const Dbm& z : f.zones) parts.push_back(zone_to_string(z, f.clocks));
  std::sort(parts.begin(), parts.end());
  std::ostringstream out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out << " || ";
    if (parts.size() > 1 && parts[i].find("&&") != std::string::npos)
      out << "(" << parts[i] << ")";
    else
      out << parts[i];
  }
  return out.str();
}

std::vector<DelayInterval> delay_intervals(const Federation& f, const std::vector<Rat>& p) {
  std::vector<DelayInterval> out;
  for (const Dbm& z : f.zones) {
    auto coord = [&](int i) { return i == 0 ? Rat(0) : p[static_cast<size_t>(i) - 1]; };
    Rat lo(0);
    bool lo_strict = false;
    Rat hi(0);
    bool hi_strict = false, hi_inf = true;
    bool feasible = true;
    for (int i = 0; feasible && i < z.dim(); ++i)
      for (int j = 0; j < z.dim(); ++j) {
        const Bound& b = z.at(i, j);
        if (b.inf || i == j) continue;
        if (i >= 1 && j >= 1) {
          Rat diff = coord(i) - coord(j);
          if (b.strict ? !(diff < Rat(b.value)) : !(diff <= Rat(b.value))) {
            feasible = false;
            break;
          }
        } else if (i >= 1) {  // x_i + t (<|<=) c
          Rat cap = Rat(b.value) - coord(i);
          if (hi_inf || cap < hi || (cap == hi && b.strict && !hi_strict)) {
            hi = cap;
            hi_strict = b.strict;
            hi_inf = false;
          }
        } else {  // -(x_j + t) (<|<=) c, so t (>|>=) -c - x_j
          Rat floor = Rat(-b.value) - coord(j);
          if (floor > lo || (floor == lo && b.strict && !lo_strict)) {
            lo = floor;
            lo_strict = b.strict;
          }
        }
      }
    if (!feasible) continue;
    if (!hi_inf) {
      if (hi < lo) continue;
      if (hi == lo && (lo_strict || hi_strict)) continue;
    }
    out.push_back(DelayInterval{lo, lo_strict, hi, hi_strict, hi_inf});
  }
  std::sort(out.begin(), out.end(), [](const DelayInterval& a, const DelayInterval& b) {
    if (a.lo != b.lo) return a.lo < b.lo;
    return !a.lo_strict && b.lo_strict;
  });
  return out;
}

std::optional<Rat> pick_delay(const std::vector<DelayInterval>& ivs) {
  if (ivs.empty()) return std::nullopt;
  const DelayInterval& iv = ivs.front();
  if (!iv.lo_strict) return iv.lo;
  if (iv.hi_inf) return iv.lo + Rat(1);
  if (!iv.hi_strict) return iv.hi;
  return midpoint(iv.lo, iv.hi);
}

}  // namespace tioa
