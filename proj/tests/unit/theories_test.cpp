#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "mlw/mlw.hpp"
#include "support/criteria.hpp"

using namespace mlw;
using namespace mlw::notations;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST(TheoryFile, DefLoads) {
  TheoryLibrary lib;
  TheoryPtr def = lib.load("DEF");
  EXPECT_EQ(def->name, "DEF");
  EXPECT_TRUE(def->signature.contains("def"));
  ASSERT_TRUE(def->axioms.find("Definedness").has_value());
  Pattern ceil_x = def->parse("⌈ x ⌉");
  EXPECT_TRUE(def->axioms.contains(ceil_x));
  EXPECT_EQ(expand(ceil_x), app(sym("def"), evar("x")));
  // x = y unfolds through floor and ceil to the core
  EXPECT_EQ(expand(def->parse("x = y")), expand(def->parse("! ⌈ ! (x <---> y) ⌉")));
}

TEST(TheoryFile, ImportsAccumulate) {
  TheoryLibrary lib;
  TheoryPtr tc = lib.load("TC");
  EXPECT_TRUE(tc->signature.contains("def"));
  EXPECT_TRUE(tc->signature.contains("tuple"));
  EXPECT_TRUE(tc->axioms.find("Definedness").has_value());
  EXPECT_EQ(tc->imports, std::vector<std::string>{"DEF"});
  EXPECT_EQ(expand(tc->parse("<x, y>")), app(app(sym("tuple"), evar("x")), evar("y")));
}

TEST(TheoryFile, Errors) {
  auto parse = [](const char* text) { return [text] { parse_theory(text); }; };
  EXPECT_EQ(code_of(parse("spec A\n symbol s s\nendspec\n")), ErrorCode::DuplicateName);
  EXPECT_EQ(code_of(parse("spec A\n import B\nendspec\n")), ErrorCode::UnknownImport);
  EXPECT_EQ(code_of(parse("spec A\n axiom Bad : mu . ! S0\nendspec\n")), ErrorCode::IllFormedAxiom);
  EXPECT_EQ(code_of(parse("spec A\n symbol s\n")), ErrorCode::Syntax);
  EXPECT_EQ(code_of(parse("spec A\n axiom X : ( s\nendspec\n")), ErrorCode::Syntax);
}

TEST(TheoryFile, ErrorsCarryLine) {
  try {
    parse_theory("spec A\n\n  symbol s\n  axiom A : s ---> \nendspec\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location().line, 4U);
  }
}

TEST(TheoryFile, CyclicImport) {
  auto dir = std::filesystem::temp_directory_path() / "mlw_cycle_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "A.mlth") << "spec A\n import B\nendspec\n";
  std::ofstream(dir / "B.mlth") << "spec B\n import A\nendspec\n";
  TheoryLibrary lib({dir});
  EXPECT_EQ(code_of([&] { lib.load("A"); }), ErrorCode::UnknownImport);
  std::filesystem::remove_all(dir);
}

TEST(TheoryFile, FixtureModelsSatisfyDefinedness) {
  TheoryLibrary lib;
  TheoryPtr def = lib.load("DEF");
  for (const char* f : {"def_single.mlmodel", "def_pair.mlmodel", "fone_def.mlmodel"}) {
    Model m = load_model(*lib.locate(f));
    EXPECT_TRUE(holds(m, def->axioms.patterns())) << f;
  }
  Model plain = load_model(*lib.locate("fone.mlmodel"));
  plain.set_symbol("def", plain.empty_set());
  EXPECT_EQ(code_of([&] { theories::require_definedness(plain, *def); }), ErrorCode::PreconditionFailed);
}

TEST(DefinednessLemmas, OnlyIfWithoutTheAxiom) {
  // Without Definedness, ⌈φ⌉ = M still implies ⟦φ⟧ ≠ ∅.
  TheoryLibrary lib;
  TheoryPtr def = lib.load("DEF");
  Model m = load_model(*lib.locate("fone.mlmodel"));
  m.set_symbol("def", m.empty_set());
  auto r = theories::definedness_not_empty_iff(m, *def, {}, sym("one"), false);
  EXPECT_TRUE(r.lhs);
  EXPECT_FALSE(r.rhs);
}

TEST(DefinednessLemmas, EqualityDistinguishes) {
  TheoryLibrary lib;
  TheoryPtr def = lib.load("DEF");
  Model m = load_model(*lib.locate("fone_def.mlmodel"));
  Signature sig = def->signature;
  for (const char* s : {"one", "two", "f"}) sig.add(s);
  auto p = [&](const char* t) { return parse_pattern(t, sig, def->notations); };
  EXPECT_TRUE(theories::equal_iff_interpr_same(m, *def, {}, p("one"), p("one or one")).lhs);
  EXPECT_FALSE(theories::equal_iff_interpr_same(m, *def, {}, p("one"), p("two")).lhs);
  EXPECT_TRUE(holds(m, p("one in (one or two)")));
  EXPECT_FALSE(holds(m, p("one in two")));
}

TEST(Criteria, CounterexampleModel) {
  auto o = mlw::testing::counterexample(TheoryLibrary());
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Criteria, DefinednessLemmasSmall) {
  auto o = mlw::testing::definedness_lemmas(TheoryLibrary(), mlw::testing::Sizes::small());
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(Criteria, TransitiveClosure) {
  auto o = mlw::testing::transitive_closure(TheoryLibrary(), mlw::testing::Sizes::small(), 5);
  EXPECT_TRUE(o.pass) << o.detail;
}

TEST(TransitiveClosure, ChainClosesToAllForwardPairs) {
  TheoryLibrary lib;
  std::vector<std::vector<bool>> rel(3, std::vector<bool>(3));
  rel[0][1] = rel[1][2] = true;
  auto pm = mlw::testing::pair_model(3, rel);
  Subset s = eval(pm.model, {}, theories::transitive_closure(*lib.load("TC"), sym("r")));
  std::set<std::size_t> want = {pm.pair(0, 1), pm.pair(1, 2), pm.pair(0, 2)};
  auto el = s.elements();
  EXPECT_EQ(std::set<std::size_t>(el.begin(), el.end()), want);
}
