#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "tioa/error.hpp"
#include "tioa/rational.hpp"
#include "tioa/zones.hpp"

namespace tioa {

// Clock constraint syntax tree. Atoms compare one clock against a constant;
// conjunction and disjunction are n-ary; negation wraps one child. Parsed
// guards are kept verbatim so that serialization round-trips; the smart
// combinators below simplify eagerly and are used when building automata.
struct Guard {
  enum class Kind { truth, falsity, atom, conj, disj, neg };
  enum class Rel { lt, le, gt, ge, eq };

  Kind kind = Kind::truth;
  std::string clock;  // atom only
  Rel rel = Rel::lt;  // atom only
  int value = 0;      // atom only
  std::vector<Guard> children;

  static Guard truth() { return Guard{}; }
  static Guard falsity() {
    Guard g;
    g.kind = Kind::falsity;
    return g;
  }
  static Guard atom(std::string clock, Rel rel, int value);

  bool is_true() const { return kind == Kind::truth; }
  bool is_false() const { return kind == Kind::falsity; }

  friend bool operator==(const Guard& a, const Guard& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == Kind::atom) return a.clock == b.clock && a.rel == b.rel && a.value == b.value;
    return a.children == b.children;
  }
};

// Simplifying combinators: true and false are absorbed or dominate, so the
// result is the literal truth value whenever it is syntactically forced.
Guard g_and(Guard a, Guard b);
Guard g_or(Guard a, Guard b);
Guard g_not(Guard a);

// Atoms over the given clocks become the truth value of "0 rel value".
Guard substitute_zero(const Guard& g, const std::set<std::string>& clocks);
// Renames every atom clock through the map (clocks absent from it persist).
Guard rename_clocks(const Guard& g, const std::map<std::string, std::string>& renaming);
// True when the guard is built from atoms and conjunction only.
bool is_conjunctive(const Guard& g);
// Every clock named by some atom.
void collect_clocks(const Guard& g, std::set<std::string>& out);

Guard parse_guard(std::string_view text);  // throws kit_error("parse", ...)
std::string to_string(const Guard& g);

bool eval_guard(const Guard& g, const std::vector<std::string>& clocks,
                const std::vector<Rat>& point);
Federation compile_guard(const Guard& g, const std::vector<std::string>& clocks);

struct Location {
  std::string id;
  Guard invariant;  // conjunctive
};

struct Edge {
  std::string source;
  std::string action;
  Guard guard;
  std::vector<std::string> resets;
  std::string target;
};

// A timed automaton with inputs and outputs. Every well-formed instance is
// deterministic; input-enabledness is a separate, optional property.
struct Tioa {
  std::string name;
  std::vector<std::string> clocks;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<Location> locations;
  std::vector<Edge> edges;
  int initial = -1;  // index into locations

  int loc_index(const std::string& id) const;
  const Location& loc(int i) const { return locations[static_cast<size_t>(i)]; }
  int clock_index(const std::string& c) const;  // 1-based, matching Dbm columns

  bool is_input(const std::string& a) const;
  bool is_output(const std::string& a) const;
  std::set<std::string> input_set() const { return {inputs.begin(), inputs.end()}; }
  std::set<std::string> output_set() const { return {outputs.begin(), outputs.end()}; }
  std::set<std::string> action_set() const;

  std::vector<int> reset_cols(const Edge& e) const;
  // Largest constant each clock is compared against, at least 0.
  std::vector<int> clock_caps() const;
};

// Reads every automaton in a model file. Throws kit_error with kind "parse",
// "schema", or "validation"; locations name the offending element, e.g.
// "automata[1].edges[3].guard".
std::vector<Tioa> parse_models(const std::string& json_text, const std::string& origin);

// Well-formedness: unique names, one initial location, declared clocks and
// actions, disjoint inputs and outputs, conjunctive invariants, the origin
// satisfying the initial invariant, and determinism (edges from one location
// on one action with overlapping enabled sets must agree on target and
// resets). Throws kit_error("validation", ...).
void validate(const Tioa& a);

std::string serialize_models(const std::vector<Tioa>& models);

// Valuations inside a location's invariant from which an input has no enabled
// edge. Empty for input-enabled automata.
struct InputGap {
  std::string location;
  std::string action;
  Federation uncovered;
};
std::vector<InputGap> input_enabledness_gaps(const Tioa& a);
bool is_input_enabled(const Tioa& a);

}  // namespace tioa
