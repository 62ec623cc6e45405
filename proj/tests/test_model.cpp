#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tioa/model.hpp"

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

// Expects parse_models to throw and hands the error to the caller's checks.
kit_error capture(const std::string& json_text) {
  try {
    parse_models(json_text, "test.json");
  } catch (const kit_error& e) {
    return e;
  }
  REQUIRE_MESSAGE(false, "expected a kit_error for: " << json_text);
  std::abort();
}

// A minimal valid model with one automaton, splice in extra fields by hand.
std::string one_automaton(const std::string& body) {
  return std::string("{\"automata\":[") + body + "]}";
}

Guard atom(const std::string& c, Guard::Rel r, int v) { return Guard::atom(c, r, v); }

}  // namespace

TEST_CASE("guard parsing builds the expected trees") {
  CHECK(parse_guard("x <= 5") == atom("x", Guard::Rel::le, 5));
  CHECK(parse_guard("x<5") == atom("x", Guard::Rel::lt, 5));
  CHECK(parse_guard("x >= 0") == atom("x", Guard::Rel::ge, 0));
  CHECK(parse_guard("x>15") == atom("x", Guard::Rel::gt, 15));
  CHECK(parse_guard("x == 4") == atom("x", Guard::Rel::eq, 4));
  CHECK(parse_guard("left.x <= 3") == atom("left.x", Guard::Rel::le, 3));
  CHECK(parse_guard("  x   <=   5  ") == atom("x", Guard::Rel::le, 5));

  // Conjunction binds tighter than disjunction; chains collect into one
  // n-ary node while parenthesized subterms stay nested.
  Guard g = parse_guard("x<1 && y<2 && z<3");
  REQUIRE(g.kind == Guard::Kind::conj);
  CHECK(g.children.size() == 3);

  Guard h = parse_guard("(x<1 && y<2) && z<3");
  REQUIRE(h.kind == Guard::Kind::conj);
  REQUIRE(h.children.size() == 2);
  CHECK(h.children[0].kind == Guard::Kind::conj);
  CHECK_FALSE(g == h);

  Guard d = parse_guard("x<1 || y<2 && z<3");
  REQUIRE(d.kind == Guard::Kind::disj);
  REQUIRE(d.children.size() == 2);
  CHECK(d.children[0] == atom("x", Guard::Rel::lt, 1));
  CHECK(d.children[1].kind == Guard::Kind::conj);

  Guard n = parse_guard("!(x<1 || y<2)");
  REQUIRE(n.kind == Guard::Kind::neg);
  CHECK(n.children[0].kind == Guard::Kind::disj);
  CHECK(parse_guard("!x<1").kind == Guard::Kind::neg);
}

TEST_CASE("guard parse errors name the offset and keep their kind") {
  auto bad = [](const std::string& text) {
    try {
      parse_guard(text);
    } catch (const kit_error& e) {
      CHECK(e.kind() == "parse");
      CHECK(e.detail().find("offset") != std::string::npos);
      return;
    }
    REQUIRE_MESSAGE(false, "expected parse failure for: " << text);
  };
  bad("");
  bad("x <=");
  bad("x ! 5");
  bad("(x<1");
  bad("x<1 &&");
  bad("x<1 y");
  bad("x < -1");
  bad("5 < x");
  bad("x < 1000001");
  bad("x & y");
}

TEST_CASE("guard printing round-trips the tree exactly") {
  const std::vector<std::string> samples = {
      "x<=5",
      "x<1 && y<2 && z<3",
      "(x<1 && y<2) && z<3",
      "x<1 && (y<2 && z<3)",
      "x<1 || y<2 && z<3",
      "(x<1 || y<2) && z<3",
      "!x<1",
      "!(x<1 && y<2)",
      "!(x<1 || y<2) && z==3",
      "x<1 || (y<2 || z<3)",
      "!(!(x<1))",
      "a.b<1 && c.d>2",
  };
  for (const std::string& s : samples) {
    Guard g = parse_guard(s);
    std::string printed = to_string(g);
    CAPTURE(s);
    CAPTURE(printed);
    CHECK(parse_guard(printed) == g);
  }

  // Frozen concrete renderings.
  CHECK(to_string(parse_guard("x <= 5")) == "x<=5");
  CHECK(to_string(parse_guard("x<1 && y<2 && z<3")) == "x<1 && y<2 && z<3");
  CHECK(to_string(parse_guard("(x<1 && y<2) && z<3")) == "(x<1 && y<2) && z<3");
  CHECK(to_string(parse_guard("x<1 || y<2 && z<3")) == "x<1 || y<2 && z<3");
  CHECK(to_string(parse_guard("(x<1 || y<2) && z<3")) == "(x<1 || y<2) && z<3");
  CHECK(to_string(parse_guard("!(x<1 && y<2)")) == "!(x<1 && y<2)");
  CHECK(to_string(Guard::truth()) == "true");
  CHECK(to_string(Guard::falsity()) == "false");
}

TEST_CASE("combinators simplify literal truth values") {
  Guard a = atom("x", Guard::Rel::lt, 1);
  Guard b = atom("y", Guard::Rel::ge, 2);

  CHECK(g_and(Guard::truth(), a) == a);
  CHECK(g_and(a, Guard::truth()) == a);
  CHECK(g_and(Guard::falsity(), a).is_false());
  CHECK(g_and(a, Guard::falsity()).is_false());
  CHECK(g_or(Guard::falsity(), a) == a);
  CHECK(g_or(a, Guard::truth()).is_true());
  CHECK(g_not(Guard::truth()).is_false());
  CHECK(g_not(Guard::falsity()).is_true());
  CHECK(g_not(g_not(a)) == a);

  // Semantics of the built trees matches zone algebra.
  std::vector<std::string> clocks = {"x", "y"};
  Federation fa = compile_guard(a, clocks);
  Federation fb = compile_guard(b, clocks);
  CHECK(same_set(compile_guard(g_and(a, b), clocks), intersect(fa, fb)));
  CHECK(same_set(compile_guard(g_or(a, b), clocks), unite(fa, fb)));
  CHECK(same_set(compile_guard(g_not(a), clocks), complement(fa)));
}

TEST_CASE("substitution, renaming, and clock collection") {
  std::vector<std::string> clocks = {"y"};

  // Dropping x at value zero: 0 <= 5 holds, 0 > 0 fails.
  Guard g1 = substitute_zero(parse_guard("x<=5 && y>0"), {"x"});
  CHECK(same_set(compile_guard(g1, clocks), compile_guard(parse_guard("y>0"), clocks)));
  Guard g2 = substitute_zero(parse_guard("x>0 || y>0"), {"x"});
  CHECK(same_set(compile_guard(g2, clocks), compile_guard(parse_guard("y>0"), clocks)));
  CHECK(substitute_zero(parse_guard("x<5"), {"x"}).is_true());
  CHECK(substitute_zero(parse_guard("x>=1"), {"x"}).is_false());
  CHECK(substitute_zero(parse_guard("x==0"), {"x"}).is_true());

  Guard r = rename_clocks(parse_guard("x<1 && q<2"), {{"x", "left.x"}});
  Guard expect = parse_guard("left.x<1 && q<2");
  CHECK(r == expect);

  std::set<std::string> used;
  collect_clocks(parse_guard("x<1 && (y<2 || x>0)"), used);
  CHECK(used == std::set<std::string>{"x", "y"});

  CHECK(is_conjunctive(parse_guard("x<1 && y<2 && x>0")));
  CHECK(is_conjunctive(Guard::truth()));
  CHECK_FALSE(is_conjunctive(parse_guard("x<1 || y<2")));
  CHECK_FALSE(is_conjunctive(parse_guard("!x<1")));
}

TEST_CASE("pointwise evaluation agrees with zone compilation") {
  std::mt19937 rng(20260817);
  std::vector<std::string> clocks = {"x", "y"};
  std::uniform_int_distribution<int> val(0, 8);
  std::uniform_int_distribution<int> rel(0, 4);
  std::uniform_int_distribution<int> shape(0, 9);
  std::uniform_int_distribution<int> clk(0, 1);

  // Random guard trees, shallow but covering every connective.
  auto gen = [&](auto&& self, int depth) -> Guard {
    int s = shape(rng);
    if (depth >= 3 || s < 4)
      return Guard::atom(clocks[static_cast<size_t>(clk(rng))],
                         static_cast<Guard::Rel>(rel(rng)), val(rng));
    if (s < 6) return g_and(self(self, depth + 1), self(self, depth + 1));
    if (s < 8) return g_or(self(self, depth + 1), self(self, depth + 1));
    if (s < 9) return g_not(self(self, depth + 1));
    Guard g;
    g.kind = s % 2 ? Guard::Kind::conj : Guard::Kind::disj;
    g.children.push_back(self(self, depth + 1));
    g.children.push_back(self(self, depth + 1));
    g.children.push_back(self(self, depth + 1));
    return g;
  };

  std::uniform_int_distribution<int> half(0, 20);
  for (int round = 0; round < 200; ++round) {
    Guard g = gen(gen, 0);
    Federation f = compile_guard(g, clocks);
    for (int p = 0; p < 20; ++p) {
      std::vector<Rat> point = {Rat(half(rng), 2), Rat(half(rng), 2)};
      CAPTURE(to_string(g));
      CAPTURE(point[0].str());
      CAPTURE(point[1].str());
      CHECK(eval_guard(g, clocks, point) == f.contains(point));
    }
  }

  // Equality atoms become two-sided bounds.
  Federation eq = compile_guard(parse_guard("x==4"), clocks);
  CHECK(eq.contains({Rat(4), Rat(0)}));
  CHECK_FALSE(eq.contains({Rat(7, 2), Rat(0)}));
  CHECK_FALSE(eq.contains({Rat(9, 2), Rat(0)}));
}

TEST_CASE("corpus files parse, validate, and round-trip") {
  std::vector<Tioa> uni = load_corpus("university.json");
  std::vector<Tioa> gal = load_corpus("gallery.json");

  REQUIRE(uni.size() == 6);
  REQUIRE(gal.size() == 14);

  const Tioa& adm = by_name(uni, "Administration");
  CHECK(adm.clocks == std::vector<std::string>{"z"});
  CHECK(adm.locations.size() == 4);
  CHECK(adm.edges.size() == 10);
  CHECK(adm.loc(adm.initial).id == "a0");
  CHECK(adm.input_set() == std::set<std::string>{"grant", "pub"});
  CHECK(adm.output_set() == std::set<std::string>{"coin", "news"});

  const Tioa& researcher = by_name(uni, "Researcher");
  CHECK(researcher.locations.size() == 4);
  CHECK(researcher.edges.size() == 12);
  CHECK(researcher.clock_caps() == std::vector<int>{15});

  CHECK(by_name(uni, "Machine").clock_caps() == std::vector<int>{6});
  CHECK(by_name(uni, "Spec").clock_caps() == std::vector<int>{20});
  CHECK(by_name(uni, "HalfAdm1").clock_caps() == std::vector<int>{2});
  CHECK(by_name(gal, "Relay").clock_caps().empty());

  for (const std::vector<Tioa>* models : {&uni, &gal}) {
    std::string text = serialize_models(*models);
    std::vector<Tioa> again = parse_models(text, "roundtrip");
    REQUIRE(again.size() == models->size());
    for (size_t i = 0; i < again.size(); ++i) {
      const Tioa& a = (*models)[i];
      const Tioa& b = again[i];
      CAPTURE(a.name);
      CHECK(a.name == b.name);
      CHECK(a.clocks == b.clocks);
      CHECK(a.inputs == b.inputs);
      CHECK(a.outputs == b.outputs);
      CHECK(a.initial == b.initial);
      REQUIRE(a.locations.size() == b.locations.size());
      for (size_t k = 0; k < a.locations.size(); ++k) {
        CHECK(a.locations[k].id == b.locations[k].id);
        CHECK(a.locations[k].invariant == b.locations[k].invariant);
      }
      REQUIRE(a.edges.size() == b.edges.size());
      for (size_t k = 0; k < a.edges.size(); ++k) {
        CHECK(a.edges[k].source == b.edges[k].source);
        CHECK(a.edges[k].action == b.edges[k].action);
        CHECK(a.edges[k].guard == b.edges[k].guard);
        CHECK(a.edges[k].resets == b.edges[k].resets);
        CHECK(a.edges[k].target == b.edges[k].target);
      }
    }
    // Serialization is a fixpoint: serializing the reparse is byte-identical.
    CHECK(serialize_models(again) == text);
  }
}

TEST_CASE("model errors carry kind and location") {
  kit_error e1 = capture("{nope");
  CHECK(e1.kind() == "parse");
  CHECK(e1.location() == "test.json");

  kit_error e2 = capture("{\"automata\": 5}");
  CHECK(e2.kind() == "schema");

  kit_error e3 = capture(one_automaton("{\"clocks\":[],\"locations\":[{\"id\":\"l\"}]}"));
  CHECK(e3.kind() == "schema");
  CHECK(e3.detail().find("name") != std::string::npos);
  CHECK(e3.location() == "test.json: automata[0]");

  kit_error e4 = capture(one_automaton(
      "{\"name\":\"A\",\"locations\":[{\"id\":\"l\",\"initial\":true,\"invariant\":\"x <\"}]}"));
  CHECK(e4.kind() == "parse");
  CHECK(e4.location() == "test.json: automata[0].locations[0].invariant");

  kit_error e5 = capture(
      one_automaton("{\"name\":\"A\",\"locations\":[{\"id\":\"l\",\"initial\":true}],"
                    "\"outputs\":[\"a\"],"
                    "\"edges\":[{\"source\":\"l\",\"action\":\"a\",\"guard\":\"q<1\","
                    "\"target\":\"l\"}]}"));
  CHECK(e5.kind() == "validation");
  CHECK(e5.detail().find("undeclared clock") != std::string::npos);

  // Two initial locations.
  kit_error e6 = capture(one_automaton(
      "{\"name\":\"A\",\"locations\":[{\"id\":\"l\",\"initial\":true},"
      "{\"id\":\"m\",\"initial\":true}]}"));
  CHECK(e6.kind() == "validation");
  CHECK(e6.location() == "test.json: automata[0].locations[1]");

  // No initial location.
  kit_error e7 = capture(one_automaton("{\"name\":\"A\",\"locations\":[{\"id\":\"l\"}]}"));
  CHECK(e7.kind() == "validation");
  CHECK(e7.detail().find("initial") != std::string::npos);

  // Action used by an edge but never declared.
  kit_error e8 = capture(
      one_automaton("{\"name\":\"A\",\"locations\":[{\"id\":\"l\",\"initial\":true}],"
                    "\"edges\":[{\"source\":\"l\",\"action\":\"go\",\"target\":\"l\"}]}"));
  CHECK(e8.kind() == "validation");
  CHECK(e8.detail().find("undeclared action") != std::string::npos);

  // Same action on both sides of the interface.
  kit_error e9 = capture(
      one_automaton("{\"name\":\"A\",\"inputs\":[\"a\"],\"outputs\":[\"a\"],"
                    "\"locations\":[{\"id\":\"l\",\"initial\":true}]}"));
  CHECK(e9.kind() == "validation");

  // Zero valuation outside the initial invariant.
  kit_error e10 = capture(
      one_automaton("{\"name\":\"A\",\"clocks\":[\"x\"],"
                    "\"locations\":[{\"id\":\"l\",\"initial\":true,\"invariant\":\"x >= 1\"}]}"));
  CHECK(e10.kind() == "validation");
  CHECK(e10.detail().find("zero valuation") != std::string::npos);

  // Disjunctive invariants are rejected, disjunctive guards are fine.
  kit_error e11 = capture(one_automaton(
      "{\"name\":\"A\",\"clocks\":[\"x\"],"
      "\"locations\":[{\"id\":\"l\",\"initial\":true,\"invariant\":\"x<1 || x>2\"}]}"));
  CHECK(e11.kind() == "validation");
  CHECK(e11.detail().find("conjunction") != std::string::npos);

  // Duplicate automaton names.
  kit_error e13 = capture(
      "{\"automata\":[{\"name\":\"A\",\"locations\":[{\"id\":\"l\",\"initial\":true}]},"
      "{\"name\":\"A\",\"locations\":[{\"id\":\"l\",\"initial\":true}]}]}");
  CHECK(e13.kind() == "validation");
  CHECK(e13.detail().find("duplicate automaton name") != std::string::npos);

  // Overlapping nondeterministic edges: same source and action, same enabled
  // valuations, different targets.
  kit_error e14 = capture(one_automaton(
      "{\"name\":\"A\",\"clocks\":[\"x\"],\"outputs\":[\"a\"],"
      "\"locations\":[{\"id\":\"l\",\"initial\":true},{\"id\":\"m\"},{\"id\":\"n\"}],"
      "\"edges\":[{\"source\":\"l\",\"action\":\"a\",\"guard\":\"x<=3\",\"target\":\"m\"},"
      "{\"source\":\"l\",\"action\":\"a\",\"guard\":\"x>=3\",\"target\":\"n\"}]}"));
  CHECK(e14.kind() == "validation");
  CHECK(e14.detail().find("nondeterministic") != std::string::npos);

  // The same pair split at the boundary is deterministic.
  std::vector<Tioa> ok = parse_models(
      one_automaton(
          "{\"name\":\"A\",\"clocks\":[\"x\"],\"outputs\":[\"a\"],"
          "\"locations\":[{\"id\":\"l\",\"initial\":true},{\"id\":\"m\"},{\"id\":\"n\"}],"
          "\"edges\":[{\"source\":\"l\",\"action\":\"a\",\"guard\":\"x<3\",\"target\":\"m\"},"
          "{\"source\":\"l\",\"action\":\"a\",\"guard\":\"x>=3\",\"target\":\"n\"}]}"),
      "test.json");
  CHECK(ok.size() == 1);

  // Overlap is judged on enabled sets: a guard overlap that the target
  // invariant cuts away does not count.
  std::vector<Tioa> ok2 = parse_models(
      one_automaton(
          "{\"name\":\"A\",\"clocks\":[\"x\"],\"outputs\":[\"a\"],"
          "\"locations\":[{\"id\":\"l\",\"initial\":true},{\"id\":\"m\",\"invariant\":\"x<=2\"},"
          "{\"id\":\"n\"}],"
          "\"edges\":[{\"source\":\"l\",\"action\":\"a\",\"guard\":\"x<=3\",\"target\":\"m\"},"
          "{\"source\":\"l\",\"action\":\"a\",\"guard\":\"x>2\",\"target\":\"n\"}]}"),
      "test.json");
  CHECK(ok2.size() == 1);
}

TEST_CASE("input enabledness gaps") {
  std::vector<Tioa> uni = load_corpus("university.json");
  for (const Tioa& a : uni) {
    CAPTURE(a.name);
    CHECK(is_input_enabled(a));
  }

  std::vector<Tioa> gal = load_corpus("gallery.json");
  for (const std::string& name :
       {"Machine2", "PartiallyInconsistent", "Relay", "MachineImpl", "PubPrompt", "PubLate",
        "PubEarly", "Watch", "Beat", "OutputChain", "ConjLeft", "ConjRight"}) {
    CAPTURE(name);
    CHECK(is_input_enabled(by_name(gal, name)));
  }

  // The input edge into an invariant the valuation cannot satisfy leaves a
  // gap: no reset, so b at x > 0 would land outside x <= 0.
  const Tioa& sender = by_name(gal, "Sender");
  std::vector<InputGap> gaps = input_enabledness_gaps(sender);
  REQUIRE(gaps.size() == 1);
  CHECK(gaps[0].location == "2");
  CHECK(gaps[0].action == "b");
  CHECK(same_set(gaps[0].uncovered, compile_guard(parse_guard("x>0"), sender.clocks)));

  const Tioa& inconsistent = by_name(gal, "Inconsistent");
  std::vector<InputGap> gaps2 = input_enabledness_gaps(inconsistent);
  REQUIRE(gaps2.size() == 1);
  CHECK(gaps2[0].location == "l0");
  CHECK(gaps2[0].action == "coin");
  CHECK(same_set(gaps2[0].uncovered, compile_guard(parse_guard("x>4"), inconsistent.clocks)));
}

TEST_CASE("edge enabledness helpers") {
  std::vector<Tioa> gal = load_corpus("gallery.json");
  const Tioa& m = by_name(gal, "MachineImpl");
  CHECK(m.loc_index("busy") == 1);
  CHECK(m.clock_index("y") == 1);
  CHECK(m.is_input("coin"));
  CHECK(m.is_output("cof"));
  CHECK_FALSE(m.is_output("coin"));
  CHECK(m.action_set() == std::set<std::string>{"coin", "cof", "tea"});

  const Edge& coin = m.edges[0];
  CHECK(m.reset_cols(coin) == std::vector<int>{1});
  CHECK(m.clock_caps() == std::vector<int>{4});
}
