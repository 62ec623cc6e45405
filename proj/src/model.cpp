#include "tioa/model.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include <json.hpp>

namespace tioa {

Guard Guard::atom(std::string clock, Rel rel, int value) {
  Guard g;
  g.kind = Kind::atom;
  g.clock = std::move(clock);
  g.rel = rel;
  g.value = value;
  return g;
}

Guard g_and(Guard a, Guard b) {
  if (a.is_false() || b.is_false()) return Guard::falsity();
  if (a.is_true()) return b;
  if (b.is_true()) return a;
  Guard g;
  g.kind = Guard::Kind::conj;
  g.children.push_back(std::move(a));
  g.children.push_back(std::move(b));
  return g;
}

Guard g_or(Guard a, Guard b) {
  if (a.is_true() || b.is_true()) return Guard::truth();
  if (a.is_false()) return b;
  if (b.is_false()) return a;
  Guard g;
  g.kind = Guard::Kind::disj;
  g.children.push_back(std::move(a));
  g.children.push_back(std::move(b));
  return g;
}

Guard g_not(Guard a) {
  if (a.is_true()) return Guard::falsity();
  if (a.is_false()) return Guard::truth();
  if (a.kind == Guard::Kind::neg) return std::move(a.children[0]);
  Guard g;
  g.kind = Guard::Kind::neg;
  g.children.push_back(std::move(a));
  return g;
}

namespace {

bool zero_satisfies(Guard::Rel rel, int value) {
  switch (rel) {
    case Guard::Rel::lt: return 0 < value;
    case Guard::Rel::le: return 0 <= value;
    case Guard::Rel::gt: return 0 > value;
    case Guard::Rel::ge: return 0 >= value;
    case Guard::Rel::eq: return 0 == value;
  }
  return false;
}

template <typename F>
Guard map_atoms(const Guard& g, F&& f) {
  switch (g.kind) {
    case Guard::Kind::truth:
    case Guard::Kind::falsity:
      return g;
    case Guard::Kind::atom:
      return f(g);
    default: {
      std::vector<Guard> kids;
      kids.reserve(g.children.size());
      for (const Guard& c : g.children) kids.push_back(map_atoms(c, f));
      if (g.kind == Guard::Kind::neg) return g_not(std::move(kids[0]));
      Guard acc = kids[0];
      for (size_t i = 1; i < kids.size(); ++i)
        acc = g.kind == Guard::Kind::conj ? g_and(std::move(acc), std::move(kids[i]))
                                          : g_or(std::move(acc), std::move(kids[i]));
      return acc;
    }
  }
}

}  // namespace

Guard substitute_zero(const Guard& g, const std::set<std::string>& clocks) {
  return map_atoms(g, [&](const Guard& a) {
    if (!clocks.count(a.clock)) return a;
    return zero_satisfies(a.rel, a.value) ? Guard::truth() : Guard::falsity();
  });
}

Guard rename_clocks(const Guard& g, const std::map<std::string, std::string>& renaming) {
  return map_atoms(g, [&](const Guard& a) {
    auto it = renaming.find(a.clock);
    if (it == renaming.end()) return a;
    Guard out = a;
    out.clock = it->second;
    return out;
  });
}

bool is_conjunctive(const Guard& g) {
  switch (g.kind) {
    case Guard::Kind::truth:
    case Guard::Kind::atom:
      return true;
    case Guard::Kind::conj:
      return std::all_of(g.children.begin(), g.children.end(),
                         [](const Guard& c) { return is_conjunctive(c); });
    default:
      return false;
  }
}

void collect_clocks(const Guard& g, std::set<std::string>& out) {
  if (g.kind == Guard::Kind::atom) {
    out.insert(g.clock);
    return;
  }
  for (const Guard& c : g.children) collect_clocks(c, out);
}

// --------------------------------------------------------------------------
// Guard grammar:  expr   := term ('||' term)*
//                 term   := factor ('&&' factor)*
//                 factor := '!' factor | '(' expr ')' | ident rel uint
//                 rel    := '<' | '<=' | '>' | '>=' | '=='
// --------------------------------------------------------------------------

namespace {

struct GuardParser {
  std::string_view text;
  size_t pos = 0;

  [[noreturn]] void fail(const std::string& msg) const {
    throw kit_error("parse", msg + " at offset " + std::to_string(pos) + " in guard \"" +
                                 std::string(text) + "\"");
  }

  void skip_ws() {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  }

  bool eat(std::string_view token) {
    skip_ws();
    if (text.substr(pos, token.size()) == token) {
      pos += token.size();
      return true;
    }
    return false;
  }

  static bool ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
  }
  static bool ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
  }

  Guard parse_expr() {
    Guard first = parse_term();
    if (!eat("||")) return first;
    Guard node;
    node.kind = Guard::Kind::disj;
    node.children.push_back(std::move(first));
    do {
      node.children.push_back(parse_term());
    } while (eat("||"));
    return node;
  }

  Guard parse_term() {
    Guard first = parse_factor();
    skip_ws();
    if (!(pos + 1 < text.size() && text[pos] == '&' && text[pos + 1] == '&')) return first;
    Guard node;
    node.kind = Guard::Kind::conj;
    node.children.push_back(std::move(first));
    while (eat("&&")) node.children.push_back(parse_factor());
    return node;
  }

  Guard parse_factor() {
    if (eat("!")) return g_raw_not(parse_factor());
    if (eat("(")) {
      Guard inner = parse_expr();
      if (!eat(")")) fail("expected ')'");
      return inner;
    }
    return parse_atom();
  }

  // The parser preserves the written structure, so a negation stays a node
  // even around another negation.
  static Guard g_raw_not(Guard a) {
    Guard g;
    g.kind = Guard::Kind::neg;
    g.children.push_back(std::move(a));
    return g;
  }

  Guard parse_atom() {
    skip_ws();
    if (pos >= text.size() || !ident_start(text[pos])) fail("expected a clock name");
    size_t start = pos;
    while (pos < text.size() && ident_char(text[pos])) ++pos;
    std::string clock(text.substr(start, pos - start));
    skip_ws();
    Guard::Rel rel;
    if (eat("<=")) {
      rel = Guard::Rel::le;
    } else if (eat(">=")) {
      rel = Guard::Rel::ge;
    } else if (eat("==")) {
      rel = Guard::Rel::eq;
    } else if (eat("<")) {
      rel = Guard::Rel::lt;
    } else if (eat(">")) {
      rel = Guard::Rel::gt;
    } else {
      fail("expected a comparison operator");
    }
    skip_ws();
    if (pos >= text.size() || !std::isdigit(static_cast<unsigned char>(text[pos]))) {
      fail("expected a non-negative integer");
    }
    long long v = 0;
    while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
      v = v * 10 + (text[pos] - '0');
      if (v > 1000000) fail("constant too large");
      ++pos;
    }
    return Guard::atom(std::move(clock), rel, static_cast<int>(v));
  }

  Guard parse_all() {
    Guard g = parse_expr();
    skip_ws();
    if (pos != text.size()) fail("unexpected trailing input");
    return g;
  }
};

constexpr int prec_disj = 1, prec_conj = 2, prec_neg = 3, prec_atom = 4;

int guard_prec(const Guard& g) {
  switch (g.kind) {
    case Guard::Kind::disj: return prec_disj;
    case Guard::Kind::conj: return prec_conj;
    case Guard::Kind::neg: return prec_neg;
    default: return prec_atom;
  }
}

const char* rel_str(Guard::Rel r) {
  switch (r) {
    case Guard::Rel::lt: return "<";
    case Guard::Rel::le: return "<=";
    case Guard::Rel::gt: return ">";
    case Guard::Rel::ge: return ">=";
    case Guard::Rel::eq: return "==";
  }
  return "?";
}

void print_guard(const Guard& g, std::string& out, int min_prec) {
  bool parens = guard_prec(g) < min_prec;
  if (parens) out += "(";
  switch (g.kind) {
    case Guard::Kind::truth:
      out += "true";
      break;
    case Guard::Kind::falsity:
      out += "false";
      break;
    case Guard::Kind::atom:
      out += g.clock;
      out += rel_str(g.rel);
      out += std::to_string(g.value);
      break;
    case Guard::Kind::neg:
      out += "!";
      print_guard(g.children[0], out, prec_neg);
      break;
    case Guard::Kind::conj:
    case Guard::Kind::disj: {
      const char* sep = g.kind == Guard::Kind::conj ? " && " : " || ";
      int child_min = guard_prec(g) + 1;
      for (size_t i = 0; i < g.children.size(); ++i) {
        if (i) out += sep;
        print_guard(g.children[i], out, child_min);
      }
      break;
    }
  }
  if (parens) out += ")";
}

}  // namespace

Guard parse_guard(std::string_view text) {
  GuardParser p{text};
  return p.parse_all();
}

std::string to_string(const Guard& g) {
  std::string out;
  print_guard(g, out, 0);
  return out;
}

namespace {

int clock_column(const std::vector<std::string>& clocks, const std::string& name) {
  for (size_t i = 0; i < clocks.size(); ++i)
    if (clocks[i] == name) return static_cast<int>(i) + 1;
  throw kit_error("validation", "guard references undeclared clock \"" + name + "\"");
}

}  // namespace

bool eval_guard(const Guard& g, const std::vector<std::string>& clocks,
                const std::vector<Rat>& point) {
  switch (g.kind) {
    case Guard::Kind::truth:
      return true;
    case Guard::Kind::falsity:
      return false;
    case Guard::Kind::atom: {
      Rat v = point[static_cast<size_t>(clock_column(clocks, g.clock)) - 1];
      Rat c(g.value);
      switch (g.rel) {
        case Guard::Rel::lt: return v < c;
        case Guard::Rel::le: return v <= c;
        case Guard::Rel::gt: return v > c;
        case Guard::Rel::ge: return v >= c;
        case Guard::Rel::eq: return v == c;
      }
      return false;
    }
    case Guard::Kind::conj:
      return std::all_of(g.children.begin(), g.children.end(),
                         [&](const Guard& c) { return eval_guard(c, clocks, point); });
    case Guard::Kind::disj:
      return std::any_of(g.children.begin(), g.children.end(),
                         [&](const Guard& c) { return eval_guard(c, clocks, point); });
    case Guard::Kind::neg:
      return !eval_guard(g.children[0], clocks, point);
  }
  return false;
}

Federation compile_guard(const Guard& g, const std::vector<std::string>& clocks) {
  switch (g.kind) {
    case Guard::Kind::truth:
      return Federation::full(clocks);
    case Guard::Kind::falsity:
      return Federation::empty(clocks);
    case Guard::Kind::atom: {
      int col = clock_column(clocks, g.clock);
      Dbm z(static_cast<int>(clocks.size()));
      z.canonicalize();
      bool ok = true;
      switch (g.rel) {
        case Guard::Rel::lt: ok = z.constrain(col, 0, Bound::less(g.value)); break;
        case Guard::Rel::le: ok = z.constrain(col, 0, Bound::less_eq(g.value)); break;
        case Guard::Rel::gt: ok = z.constrain(0, col, Bound::less(-g.value)); break;
        case Guard::Rel::ge: ok = z.constrain(0, col, Bound::less_eq(-g.value)); break;
        case Guard::Rel::eq:
          ok = z.constrain(col, 0, Bound::less_eq(g.value)) &&
               z.constrain(0, col, Bound::less_eq(-g.value));
          break;
      }
      Federation f = Federation::empty(clocks);
      if (ok) f.add(std::move(z));
      return f;
    }
    case Guard::Kind::conj: {
      Federation f = Federation::full(clocks);
      for (const Guard& c : g.children) f = intersect(f, compile_guard(c, clocks));
      return f;
    }
    case Guard::Kind::disj: {
      Federation f = Federation::empty(clocks);
      for (const Guard& c : g.children) f = unite(std::move(f), compile_guard(c, clocks));
      return f;
    }
    case Guard::Kind::neg:
      return complement(compile_guard(g.children[0], clocks));
  }
  return Federation::empty(clocks);
}

// --------------------------------------------------------------------------
// Automaton helpers
// --------------------------------------------------------------------------

int Tioa::loc_index(const std::string& id) const {
  for (size_t i = 0; i < locations.size(); ++i)
    if (locations[i].id == id) return static_cast<int>(i);
  throw kit_error("validation", "automaton \"" + name + "\" has no location \"" + id + "\"");
}

int Tioa::clock_index(const std::string& c) const { return clock_column(clocks, c); }

bool Tioa::is_input(const std::string& a) const {
  return std::find(inputs.begin(), inputs.end(), a) != inputs.end();
}

bool Tioa::is_output(const std::string& a) const {
  return std::find(outputs.begin(), outputs.end(), a) != outputs.end();
}

std::set<std::string> Tioa::action_set() const {
  std::set<std::string> s(inputs.begin(), inputs.end());
  s.insert(outputs.begin(), outputs.end());
  return s;
}

std::vector<int> Tioa::reset_cols(const Edge& e) const {
  std::vector<int> cols;
  cols.reserve(e.resets.size());
  for (const std::string& r : e.resets) cols.push_back(clock_index(r));
  return cols;
}

std::vector<int> Tioa::clock_caps() const {
  std::vector<int> caps(clocks.size(), 0);
  auto scan = [&](const Guard& g, auto&& self) -> void {
    if (g.kind == Guard::Kind::atom) {
      size_t i = static_cast<size_t>(clock_column(clocks, g.clock)) - 1;
      caps[i] = std::max(caps[i], g.value);
      return;
    }
    for (const Guard& c : g.children) self(c, self);
  };
  for (const Location& l : locations) scan(l.invariant, scan);
  for (const Edge& e : edges) scan(e.guard, scan);
  return caps;
}

// --------------------------------------------------------------------------
// JSON input and output
// --------------------------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

[[noreturn]] void schema_fail(const std::string& detail, const std::string& where) {
  throw kit_error("schema", detail, where);
}

std::string require_string(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) schema_fail(std::string("missing required field \"") + key + "\"", where);
  if (!j[key].is_string()) schema_fail(std::string("field \"") + key + "\" must be a string", where);
  return j[key].get<std::string>();
}

std::vector<std::string> optional_string_array(const ordered_json& j, const char* key,
                                               const std::string& where) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) schema_fail(std::string("field \"") + key + "\" must be an array", where);
  for (const auto& item : j[key]) {
    if (!item.is_string())
      schema_fail(std::string("field \"") + key + "\" must contain strings", where);
    out.push_back(item.get<std::string>());
  }
  return out;
}

Guard guard_field(const ordered_json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) return Guard::truth();
  if (!j[key].is_string()) schema_fail(std::string("field \"") + key + "\" must be a string", where);
  try {
    return parse_guard(j[key].get<std::string>());
  } catch (const kit_error& e) {
    throw kit_error(e.kind(), e.detail(), where + "." + key);
  }
}

Tioa parse_automaton(const ordered_json& j, const std::string& where) {
  if (!j.is_object()) schema_fail("automaton entry must be an object", where);
  Tioa a;
  a.name = require_string(j, "name", where);
  a.clocks = optional_string_array(j, "clocks", where);
  a.inputs = optional_string_array(j, "inputs", where);
  a.outputs = optional_string_array(j, "outputs", where);

  if (!j.contains("locations") || !j["locations"].is_array())
    schema_fail("field \"locations\" must be an array", where);
  int idx = 0;
  for (const auto& lj : j["locations"]) {
    std::string lwhere = where + ".locations[" + std::to_string(idx) + "]";
    if (!lj.is_object()) schema_fail("location entry must be an object", lwhere);
    Location l;
    l.id = require_string(lj, "id", lwhere);
    l.invariant = guard_field(lj, "invariant", lwhere);
    if (lj.contains("initial")) {
      if (!lj["initial"].is_boolean()) schema_fail("field \"initial\" must be a boolean", lwhere);
      if (lj["initial"].get<bool>()) {
        if (a.initial >= 0)
          throw kit_error("validation", "more than one initial location", lwhere);
        a.initial = idx;
      }
    }
    a.locations.push_back(std::move(l));
    ++idx;
  }

  if (j.contains("edges")) {
    if (!j["edges"].is_array()) schema_fail("field \"edges\" must be an array", where);
    idx = 0;
    for (const auto& ej : j["edges"]) {
      std::string ewhere = where + ".edges[" + std::to_string(idx) + "]";
      if (!ej.is_object()) schema_fail("edge entry must be an object", ewhere);
      Edge e;
      e.source = require_string(ej, "source", ewhere);
      e.action = require_string(ej, "action", ewhere);
      e.target = require_string(ej, "target", ewhere);
      e.guard = guard_field(ej, "guard", ewhere);
      e.resets = optional_string_array(ej, "resets", ewhere);
      a.edges.push_back(std::move(e));
      ++idx;
    }
  }
  return a;
}

}  // namespace

std::vector<Tioa> parse_models(const std::string& json_text, const std::string& origin) {
  ordered_json root;
  try {
    root = ordered_json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw kit_error("parse", e.what(), origin);
  }
  if (!root.is_object() || !root.contains("automata") || !root["automata"].is_array())
    schema_fail("model file must be an object with an \"automata\" array", origin);

  std::vector<Tioa> out;
  std::set<std::string> names;
  int idx = 0;
  for (const auto& aj : root["automata"]) {
    std::string where = origin + ": automata[" + std::to_string(idx) + "]";
    Tioa a = parse_automaton(aj, where);
    if (!names.insert(a.name).second)
      throw kit_error("validation", "duplicate automaton name \"" + a.name + "\"", where);
    try {
      validate(a);
    } catch (const kit_error& e) {
      throw kit_error(e.kind(), e.detail(),
                      e.location().empty() ? where + " (" + a.name + ")" : e.location());
    }
    out.push_back(std::move(a));
    ++idx;
  }
  return out;
}

namespace {

bool valid_ident(const std::string& s) {
  if (s.empty() || !GuardParser::ident_start(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return GuardParser::ident_char(c); });
}

void check_unique(const std::vector<std::string>& items, const char* what,
                  const std::string& who) {
  std::set<std::string> seen;
  for (const std::string& s : items) {
    if (!valid_ident(s))
      throw kit_error("validation",
                      std::string(what) + " \"" + s + "\" in \"" + who + "\" is not a valid name");
    if (!seen.insert(s).second)
      throw kit_error("validation",
                      std::string("duplicate ") + what + " \"" + s + "\" in \"" + who + "\"");
  }
}

}  // namespace

void validate(const Tioa& a) {
  if (a.name.empty()) throw kit_error("validation", "automaton has an empty name");
  check_unique(a.clocks, "clock", a.name);
  check_unique(a.inputs, "input", a.name);
  check_unique(a.outputs, "output", a.name);
  for (const std::string& i : a.inputs)
    if (a.is_output(i))
      throw kit_error("validation",
                      "action \"" + i + "\" is both an input and an output of \"" + a.name + "\"");

  if (a.locations.empty())
    throw kit_error("validation", "automaton \"" + a.name + "\" has no locations");
  std::set<std::string> loc_ids;
  for (const Location& l : a.locations) {
    if (l.id.empty())
      throw kit_error("validation", "automaton \"" + a.name + "\" has a location with empty id");
    if (!loc_ids.insert(l.id).second)
      throw kit_error("validation",
                      "duplicate location id \"" + l.id + "\" in \"" + a.name + "\"");
    if (!is_conjunctive(l.invariant))
      throw kit_error("validation", "invariant of location \"" + l.id + "\" in \"" + a.name +
                                        "\" must be a conjunction of clock bounds");
    std::set<std::string> used;
    collect_clocks(l.invariant, used);
    for (const std::string& c : used)
      if (std::find(a.clocks.begin(), a.clocks.end(), c) == a.clocks.end())
        throw kit_error("validation", "invariant of location \"" + l.id + "\" in \"" + a.name +
                                          "\" references undeclared clock \"" + c + "\"");
  }
  if (a.initial < 0 || a.initial >= static_cast<int>(a.locations.size()))
    throw kit_error("validation", "automaton \"" + a.name + "\" needs exactly one initial location");

  for (size_t i = 0; i < a.edges.size(); ++i) {
    const Edge& e = a.edges[i];
    std::string ctx = "edge " + std::to_string(i) + " of \"" + a.name + "\"";
    if (!loc_ids.count(e.source))
      throw kit_error("validation", ctx + " starts at unknown location \"" + e.source + "\"");
    if (!loc_ids.count(e.target))
      throw kit_error("validation", ctx + " ends at unknown location \"" + e.target + "\"");
    if (!a.is_input(e.action) && !a.is_output(e.action))
      throw kit_error("validation", ctx + " uses undeclared action \"" + e.action + "\"");
    std::set<std::string> rs;
    for (const std::string& r : e.resets) {
      if (std::find(a.clocks.begin(), a.clocks.end(), r) == a.clocks.end())
        throw kit_error("validation", ctx + " resets undeclared clock \"" + r + "\"");
      if (!rs.insert(r).second)
        throw kit_error("validation", ctx + " resets clock \"" + r + "\" twice");
    }
    std::set<std::string> used;
    collect_clocks(e.guard, used);
    for (const std::string& c : used)
      if (std::find(a.clocks.begin(), a.clocks.end(), c) == a.clocks.end())
        throw kit_error("validation", ctx + " guard references undeclared clock \"" + c + "\"");
  }

  // The origin must satisfy the initial location's invariant.
  std::vector<Rat> zeros(a.clocks.size(), Rat(0));
  if (!eval_guard(a.loc(a.initial).invariant, a.clocks, zeros))
    throw kit_error("validation", "initial location \"" + a.loc(a.initial).id + "\" of \"" +
                                      a.name + "\" rejects the zero valuation");

  // Determinism: two edges from the same location on the same action whose
  // enabled sets (guard plus target invariant after resets) overlap must move
  // to the same location with the same resets.
  for (size_t i = 0; i < a.edges.size(); ++i)
    for (size_t j = i + 1; j < a.edges.size(); ++j) {
      const Edge& e1 = a.edges[i];
      const Edge& e2 = a.edges[j];
      if (e1.source != e2.source || e1.action != e2.action) continue;
      std::set<std::string> r1(e1.resets.begin(), e1.resets.end());
      std::set<std::string> r2(e2.resets.begin(), e2.resets.end());
      if (e1.target == e2.target && r1 == r2) continue;
      Federation en1 = intersect(
          compile_guard(e1.guard, a.clocks),
          pre_reset(compile_guard(a.loc(a.loc_index(e1.target)).invariant, a.clocks),
                    a.reset_cols(e1)));
      Federation en2 = intersect(
          compile_guard(e2.guard, a.clocks),
          pre_reset(compile_guard(a.loc(a.loc_index(e2.target)).invariant, a.clocks),
                    a.reset_cols(e2)));
      if (!intersect(en1, en2).is_empty())
        throw kit_error("validation", "automaton \"" + a.name +
                                          "\" is nondeterministic: edges " + std::to_string(i) +
                                          " and " + std::to_string(j) + " from \"" + e1.source +
                                          "\" on \"" + e1.action + "\" overlap");
    }
}

std::string serialize_models(const std::vector<Tioa>& models) {
  ordered_json root;
  root["automata"] = ordered_json::array();
  for (const Tioa& a : models) {
    ordered_json aj;
    aj["name"] = a.name;
    aj["clocks"] = a.clocks;
    aj["inputs"] = a.inputs;
    aj["outputs"] = a.outputs;
    aj["locations"] = ordered_json::array();
    for (size_t i = 0; i < a.locations.size(); ++i) {
      const Location& l = a.locations[i];
      ordered_json lj;
      lj["id"] = l.id;
      if (static_cast<int>(i) == a.initial) lj["initial"] = true;
      if (!l.invariant.is_true()) lj["invariant"] = to_string(l.invariant);
      aj["locations"].push_back(std::move(lj));
    }
    aj["edges"] = ordered_json::array();
    for (const Edge& e : a.edges) {
      ordered_json ej;
      ej["source"] = e.source;
      ej["action"] = e.action;
      if (!e.guard.is_true()) ej["guard"] = to_string(e.guard);
      if (!e.resets.empty()) ej["resets"] = e.resets;
      ej["target"] = e.target;
      aj["edges"].push_back(std::move(ej));
    }
    root["automata"].push_back(std::move(aj));
  }
  return root.dump(2) + "\n";
}

std::vector<InputGap> input_enabledness_gaps(const Tioa& a) {
  std::vector<InputGap> gaps;
  for (const Location& l : a.locations) {
    Federation inv = compile_guard(l.invariant, a.clocks);
    for (const std::string& in : a.inputs) {
      Federation covered = Federation::empty(a.clocks);
      for (const Edge& e : a.edges) {
        if (e.source != l.id || e.action != in) continue;
        Federation en = intersect(
            compile_guard(e.guard, a.clocks),
            pre_reset(compile_guard(a.loc(a.loc_index(e.target)).invariant, a.clocks),
                      a.reset_cols(e)));
        covered = unite(std::move(covered), en);
      }
      Federation uncovered = subtract(inv, covered);
      if (!uncovered.is_empty()) gaps.push_back(InputGap{l.id, in, std::move(uncovered)});
    }
  }
  return gaps;
}

bool is_input_enabled(const Tioa& a) { return input_enabledness_gaps(a).empty(); }

}  // namespace tioa
