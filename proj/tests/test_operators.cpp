#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "tioa/operators.hpp"

using namespace tioa;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string corpus_dir() {
  const char* env = std::getenv("TIOA_CORPUS");
  return env ? env : "corpus";
}

std::vector<Tioa> load_corpus(const std::string& file) {
  return parse_models(read_file(corpus_dir() + "/" + file), file);
}

const Tioa& by_name(const std::vector<Tioa>& models, const std::string& name) {
  for (const Tioa& a : models)
    if (a.name == name) return a;
  REQUIRE_MESSAGE(false, "no automaton named " << name);
  std::abort();
}

Federation fed(const std::vector<std::string>& clocks, const std::string& expr) {
  return compile_guard(parse_guard(expr), clocks);
}

const Edge& edge_at(const Tioa& a, const std::string& src, const std::string& action,
                    const std::string& tgt) {
  for (const Edge& e : a.edges)
    if (e.source == src && e.action == action && e.target == tgt) return e;
  REQUIRE_MESSAGE(false, "no edge " << src << " -" << action << "-> " << tgt);
  std::abort();
}

int count_edges(const Tioa& a, const std::string& src, const std::string& action) {
  int n = 0;
  for (const Edge& e : a.edges)
    if (e.source == src && e.action == action) ++n;
  return n;
}

bool guard_same(const Guard& g, const Tioa& a, const std::string& expr) {
  return same_set(compile_guard(g, a.clocks), fed(a.clocks, expr));
}

std::set<std::string> ids(const Tioa& a) {
  std::set<std::string> out;
  for (const Location& l : a.locations) out.insert(l.id);
  return out;
}

Tioa inline_model(const std::string& body) {
  return parse_models("{\"automata\":[" + body + "]}", "inline")[0];
}

const char* kNeutral =
    R"({"name":"neutral","clocks":[],"inputs":[],"outputs":[],
        "locations":[{"id":"only","initial":true}],"edges":[]})";

}  // namespace

TEST_CASE("conjunction of the two half administrations") {
  auto uni = load_corpus("university.json");
  Tioa both = conjunction(by_name(uni, "HalfAdm1"), by_name(uni, "HalfAdm2"));
  CHECK_NOTHROW(validate(both));

  CHECK(both.clocks == std::vector<std::string>{"x", "y"});
  CHECK(both.inputs == std::vector<std::string>{"grant", "pub"});
  CHECK(both.outputs == std::vector<std::string>{"coin", "news"});
  CHECK(ids(both) == std::set<std::string>{"(A,C)", "(A,D)", "(B,C)", "(B,D)"});
  CHECK(both.locations[both.initial].id == "(A,C)");

  // No shared actions, so the product is a pure interleaving.
  CHECK(both.edges.size() == 12);
  const Edge& grant = edge_at(both, "(A,D)", "grant", "(B,D)");
  CHECK(grant.resets == std::vector<std::string>{"x"});
  CHECK(guard_same(both.locations[both.loc_index("(B,D)")].invariant, both,
                   "x <= 2 && y <= 2"));
  CHECK(both.locations[both.loc_index("(A,C)")].invariant.is_true());
}

TEST_CASE("conjunction renames colliding clocks") {
  auto uni = load_corpus("university.json");
  const Tioa& machine = by_name(uni, "Machine");
  Tioa self = conjunction(machine, machine);
  CHECK_NOTHROW(validate(self));
  CHECK(self.clocks == std::vector<std::string>{"left.y", "right.y"});
  CHECK(ids(self) == std::set<std::string>{"(idle,idle)", "(idle,busy)", "(busy,idle)",
                                           "(busy,busy)"});

  const Edge& coin = edge_at(self, "(idle,idle)", "coin", "(busy,busy)");
  CHECK(coin.resets == std::vector<std::string>{"left.y", "right.y"});
  const Edge& tea = edge_at(self, "(idle,busy)", "tea", "(idle,idle)");
  CHECK(guard_same(tea.guard, self, "left.y >= 2"));
  const Edge& cof = edge_at(self, "(busy,busy)", "cof", "(idle,idle)");
  CHECK(guard_same(cof.guard, self, "left.y >= 4 && right.y >= 4"));
}

TEST_CASE("conjunction rejects mismatched roles") {
  auto gal = load_corpus("gallery.json");
  try {
    conjunction(by_name(gal, "Sender"), by_name(gal, "Relay"));
    REQUIRE(false);
  } catch (const kit_error& e) {
    CHECK(e.kind() == "precondition");
    CHECK(std::string(e.detail()).find("input") != std::string::npos);
  }
}

TEST_CASE("composition of machine and researcher") {
  auto uni = load_corpus("university.json");
  Tioa prod = composition(by_name(uni, "Machine"), by_name(uni, "Researcher"));
  CHECK_NOTHROW(validate(prod));

  CHECK(prod.inputs == std::vector<std::string>{"coin"});
  CHECK(prod.outputs == std::vector<std::string>{"cof", "pub", "tea"});
  CHECK(prod.locations.size() == 8);
  CHECK(prod.locations[prod.initial].id == "(idle,init)");

  // The served coffee synchronizes and resets the researcher's clock.
  const Edge& cof = edge_at(prod, "(busy,init)", "cof", "(idle,busyc)");
  CHECK(guard_same(cof.guard, prod, "y >= 4"));
  CHECK(cof.resets == std::vector<std::string>{"x"});

  // The machine's coin input interleaves past the researcher.
  const Edge& coin = edge_at(prod, "(idle,err)", "coin", "(busy,err)");
  CHECK(coin.resets == std::vector<std::string>{"y"});

  // Every location of the product is reachable.
  CHECK(reach_prune(Spec(prod)).location_count() == 8);
}

TEST_CASE("composition builds the sender relay chain") {
  auto gal = load_corpus("gallery.json");
  Tioa prod = composition(by_name(gal, "Sender"), by_name(gal, "Relay"));
  CHECK_NOTHROW(validate(prod));
  CHECK(prod.inputs.empty());
  CHECK(prod.outputs == std::vector<std::string>{"a", "b"});

  Spec chain = reach_prune(Spec(prod));
  REQUIRE(chain.location_count() == 3);
  CHECK(chain.location_id(0) == "(1,4)");
  CHECK(chain.location_id(1) == "(2,5)");
  CHECK(chain.location_id(2) == "(3,6)");
  REQUIRE(chain.edge_count() == 2);
  CHECK(chain.automaton().edges[0].action == "a");
  CHECK(chain.automaton().edges[1].action == "b");
  CHECK(guard_same(chain.automaton().locations[2].invariant, chain.automaton(), "x <= 0"));
  CHECK(chain.automaton().locations[0].invariant.is_true());
}

TEST_CASE("composition rejects a shared output") {
  auto gal = load_corpus("gallery.json");
  try {
    composition(by_name(gal, "Sender"), by_name(gal, "Sender"));
    REQUIRE(false);
  } catch (const kit_error& e) {
    CHECK(e.kind() == "precondition");
    CHECK(std::string(e.detail()).find("'a'") != std::string::npos);
  }
}

TEST_CASE("composition with a neutral operand keeps the other") {
  auto uni = load_corpus("university.json");
  const Tioa& machine = by_name(uni, "Machine");
  Tioa prod = composition(machine, inline_model(kNeutral));
  CHECK_NOTHROW(validate(prod));
  CHECK(prod.inputs == machine.inputs);
  CHECK(prod.outputs == machine.outputs);
  CHECK(prod.clocks == machine.clocks);
  REQUIRE(prod.locations.size() == machine.locations.size());
  REQUIRE(prod.edges.size() == machine.edges.size());

  auto fingerprint = [](const Tioa& a) {
    std::multiset<std::string> keys;
    for (const Edge& e : a.edges) {
      std::string resets;
      for (const std::string& r : e.resets) resets += " " + r;
      keys.insert(e.action + "|" + to_string(e.guard) + "|" + resets);
    }
    return keys;
  };
  CHECK(fingerprint(prod) == fingerprint(machine));
}

TEST_CASE("quotient alphabet and skeleton") {
  auto uni = load_corpus("university.json");
  Tioa q = quotient(by_name(uni, "Spec"), by_name(uni, "Administration"));
  CHECK_NOTHROW(validate(q));

  CHECK(q.inputs == std::vector<std::string>{"coin", "grant", "i_new", "news"});
  CHECK(q.outputs == std::vector<std::string>{"pub"});
  CHECK(q.clocks == std::vector<std::string>{"u", "z", "x_new"});
  CHECK(q.locations.size() == 3 * 4 + 2);
  CHECK(q.locations[q.initial].id == "(s0,a0)");

  const Location& err = q.locations[q.loc_index("l_err")];
  CHECK(guard_same(err.invariant, q, "x_new <= 0"));
  CHECK(q.locations[q.loc_index("l_univ")].invariant.is_true());
  CHECK(q.locations[q.loc_index("(s1,a1)")].invariant.is_true());

  // Fresh-input edge into the inconsistent location: exactly where the
  // numerator cannot stay but the denominator can.
  const Edge& give_up = edge_at(q, "(s1,a1)", "i_new", "l_err");
  CHECK(guard_same(give_up.guard, q, "u > 20 && z <= 2"));
  CHECK(give_up.resets == std::vector<std::string>{"x_new"});
  const Edge& hold = edge_at(q, "(s1,a1)", "i_new", "(s1,a1)");
  CHECK(guard_same(hold.guard, q, "u <= 20 || z > 2"));
  CHECK(hold.resets.empty());

  // Universal location swallows every action; the inconsistent one only
  // accepts inputs at its frozen instant.
  for (const std::string& a : {"coin", "grant", "i_new", "news", "pub"})
    CHECK(edge_at(q, "l_univ", a, "l_univ").guard.is_true());
  CHECK(count_edges(q, "l_univ", "i_new") == 1);
  for (const std::string& a : {"coin", "grant", "i_new", "news"})
    CHECK(guard_same(edge_at(q, "l_err", a, "l_err").guard, q, "x_new == 0"));
  CHECK(count_edges(q, "l_err", "pub") == 0);
}

TEST_CASE("quotient by a neutral denominator adds fresh input loops") {
  auto gal = load_corpus("gallery.json");
  Tioa q = quotient(by_name(gal, "Watch"), inline_model(kNeutral));
  CHECK_NOTHROW(validate(q));
  CHECK(q.inputs == std::vector<std::string>{"a", "i_new"});
  CHECK(q.outputs.empty());
  CHECK(q.clocks == std::vector<std::string>{"x_new"});

  Spec trimmed = reach_prune(Spec(q));
  REQUIRE(trimmed.location_count() == 2);
  CHECK(trimmed.location_id(0) == "(m0,only)");
  CHECK(trimmed.location_id(1) == "(m1,only)");
  REQUIRE(trimmed.edge_count() == 4);
  CHECK(count_edges(trimmed.automaton(), "(m0,only)", "a") == 1);
  CHECK(count_edges(trimmed.automaton(), "(m0,only)", "i_new") == 1);
  CHECK(edge_at(trimmed.automaton(), "(m1,only)", "i_new", "(m1,only)").guard.is_true());
}

TEST_CASE("quotient rejects denominator outputs that feed the numerator") {
  auto uni = load_corpus("university.json");
  try {
    quotient(by_name(uni, "Researcher"), by_name(uni, "Machine"));
    REQUIRE(false);
  } catch (const kit_error& e) {
    CHECK(e.kind() == "precondition");
  }
}

TEST_CASE("quotient freshens reserved names") {
  Tioa odd = inline_model(
      R"({"name":"odd","clocks":["x_new"],"inputs":["i_new"],"outputs":[],
          "locations":[{"id":"p","initial":true}],
          "edges":[{"source":"p","action":"i_new","target":"p"}]})");
  Tioa q = quotient(odd, inline_model(kNeutral));
  CHECK_NOTHROW(validate(q));
  CHECK(q.clocks == std::vector<std::string>{"x_new", "x_new2"});
  CHECK(q.inputs == std::vector<std::string>{"i_new", "i_new2"});
}

TEST_CASE("quotient refuses pruned operands") {
  auto uni = load_corpus("university.json");
  Spec machine(by_name(uni, "Machine"));
  Spec marked(by_name(uni, "Spec"),
              {compile_guard(Guard::truth(), {"u"}), fed({"u"}, "u <= 20"),
               compile_guard(Guard::truth(), {"u"})});
  try {
    quotient(marked, machine);
    REQUIRE(false);
  } catch (const kit_error& e) {
    CHECK(e.kind() == "precondition");
  }
}

TEST_CASE("pruned operands thread admissible regions through products") {
  auto uni = load_corpus("university.json");
  auto gal = load_corpus("gallery.json");
  const Tioa& machine = by_name(uni, "Machine");
  int idle = machine.loc_index("idle");
  int busy = machine.loc_index("busy");
  std::vector<Federation> cons(2, Federation::empty({"y"}));
  cons[idle] = fed({"y"}, "y <= 3");
  cons[busy] = fed({"y"}, "y <= 2");
  Spec restricted(machine, cons);

  Spec prod = conjunction(restricted, Spec(by_name(gal, "Watch")));
  REQUIRE(prod.is_pruned());
  const Tioa& pa = prod.automaton();
  CHECK(pa.clocks == std::vector<std::string>{"y"});
  int pb = pa.loc_index("(busy,m0)");
  CHECK(same_set(prod.admissible(pb), fed({"y"}, "y <= 2")));

  // The coin edge is clipped at both ends by the threaded regions.
  for (int e = 0; e < prod.edge_count(); ++e) {
    if (pa.edges[e].source != "(idle,m0)" || pa.edges[e].action != "coin") continue;
    CHECK(same_set(prod.edge_enabled(e), fed({"y"}, "y <= 3")));
  }

  Spec raw_prod = composition(Spec(machine), Spec(by_name(uni, "Researcher")));
  CHECK(!raw_prod.is_pruned());
}

TEST_CASE("operator outputs validate across the corpus") {
  auto uni = load_corpus("university.json");
  auto gal = load_corpus("gallery.json");
  const Tioa& adm = by_name(uni, "Administration");
  const Tioa& machine = by_name(uni, "Machine");
  const Tioa& researcher = by_name(uni, "Researcher");
  const Tioa& spec = by_name(uni, "Spec");

  CHECK_NOTHROW(validate(conjunction(by_name(gal, "ConjLeft"), by_name(gal, "ConjRight"))));
  CHECK_NOTHROW(validate(composition(composition(adm, machine), researcher)));
  CHECK_NOTHROW(validate(composition(adm, composition(machine, researcher))));
  CHECK_NOTHROW(validate(quotient(spec, adm)));
  CHECK_NOTHROW(validate(quotient(by_name(gal, "Beat"), by_name(gal, "Watch"))));
  CHECK_NOTHROW(validate(quotient(spec, composition(adm, composition(machine, researcher)))));

  // Folding order does not change the composed alphabet.
  Tioa left = composition(composition(adm, machine), researcher);
  Tioa right = composition(adm, composition(machine, researcher));
  CHECK(left.inputs == right.inputs);
  CHECK(left.outputs == right.outputs);
  CHECK(left.inputs == std::vector<std::string>{"grant"});
  CHECK(left.outputs == std::vector<std::string>{"cof", "coin", "news", "pub", "tea"});
}

TEST_CASE("cooperative pruning changes nothing") {
  auto uni = load_corpus("university.json");
  Spec machine(by_name(uni, "Machine"));
  Spec same = cooperative_pruning(machine);
  CHECK(same.location_count() == machine.location_count());
  CHECK(same.edge_count() == machine.edge_count());
  CHECK(!same.is_pruned());
  for (int l = 0; l < machine.location_count(); ++l)
    CHECK(same_set(same.admissible(l), machine.admissible(l)));
}
