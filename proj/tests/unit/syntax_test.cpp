#include <gtest/gtest.h>

#include "mlw/notation.hpp"
#include "mlw/parser.hpp"
#include "mlw/printer.hpp"
#include "mlw/syntax.hpp"

using namespace mlw;
using namespace mlw::notations;

TEST(Pattern, DefaultIsBot) {
  Pattern p;
  EXPECT_EQ(p.kind(), Kind::Bot);
  EXPECT_EQ(p, bot());
}

TEST(Pattern, StructuralEquality) {
  EXPECT_EQ(app(sym("f"), evar("x")), app(sym("f"), evar("x")));
  EXPECT_NE(app(sym("f"), evar("x")), app(sym("f"), evar("y")));
  EXPECT_NE(evar("x"), svar("x"));
  EXPECT_NE(bevar(0), bsvar(0));
}

TEST(Pattern, NotationExpansionIsCore) {
  Pattern p = and_(evar("x"), not_(evar("y")));
  EXPECT_TRUE(p.has_notation());
  EXPECT_FALSE(expand(p).has_notation());
  EXPECT_TRUE(same_core(not_(evar("x")), imp(evar("x"), bot())));
}

TEST(WellFormed, ClosedAndPositive) {
  EXPECT_TRUE(well_formed(exists(bevar(0))));
  EXPECT_FALSE(well_formed(bevar(0)));
  EXPECT_FALSE(well_formed(exists(bevar(1))));
  EXPECT_TRUE(well_formed(mu(bsvar(0))));
  EXPECT_FALSE(well_formed(mu(imp(bsvar(0), bot()))));
  // double negation is positive
  EXPECT_TRUE(well_formed(mu(imp(imp(bsvar(0), bot()), bot()))));
  // inner binder shifts the index
  EXPECT_FALSE(well_formed(mu(mu(imp(bsvar(1), bot())))));
  EXPECT_TRUE(well_formed(mu(mu(app(bsvar(0), bsvar(1))))));
  EXPECT_FALSE(well_formed(mu(mu(imp(bsvar(0), bsvar(1))))));
}

TEST(Substitution, OpenUnderBinder) {
  // ∃. b0 → b1 opened at 0 with x: ∃. b0 → x
  Pattern p = exists(imp(bevar(0), bevar(1)));
  EXPECT_EQ(evar_open(0, "x", p), exists(imp(bevar(0), evar("x"))));
}

TEST(Substitution, BoundSubstDecrementsHigherIndices) {
  // b0 b1 [x/0] = x b0 : the outer index loses its binder
  Pattern p = app(bevar(0), bevar(1));
  EXPECT_EQ(bevar_subst(p, evar("x"), 0), app(evar("x"), bevar(0)));
}

TEST(Substitution, FreeSubstRequiresClosed) {
  try {
    fevar_subst(evar("x"), bevar(0), "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotClosed);
  }
  EXPECT_EQ(fsvar_subst(imp(svar("X"), svar("Y")), sym("c"), "X"), imp(sym("c"), svar("Y")));
}

TEST(Substitution, QuantifyInvertsOpen) {
  Pattern body = app(sym("f"), imp(evar("x"), exists(evar("x"))));
  Pattern q = exists_quantify("x", body);
  EXPECT_EQ(q, exists(app(sym("f"), imp(bevar(0), exists(bevar(1))))));
  EXPECT_EQ(evar_open(0, "x", q.body()), body);
}

TEST(FreshNames, AvoidAll) {
  EXPECT_EQ(fresh_name({}, "x"), "x");
  std::string f = fresh_name({"x", "x'", "y"}, "x");
  EXPECT_NE(f, "x");
  EXPECT_NE(f, "x'");
  EXPECT_NE(f, "y");
  EXPECT_FALSE(evar_occurs(app(evar("x"), evar("x'")), fresh_evar(app(evar("x"), evar("x'")))));
}

TEST(Parser, PrecedenceAndAssociativity) {
  EXPECT_EQ(parse_pattern("a ---> b ---> c"), imp(evar("a"), imp(evar("b"), evar("c"))));
  EXPECT_EQ(parse_pattern("a or b and c"), or_(evar("a"), and_(evar("b"), evar("c"))));
  EXPECT_EQ(parse_pattern("a or b or c"), or_(or_(evar("a"), evar("b")), evar("c")));
  EXPECT_EQ(parse_pattern("! a ---> b"), imp(not_(evar("a")), evar("b")));
  EXPECT_EQ(parse_pattern("f x y"), app(app(evar("f"), evar("x")), evar("y")));
  EXPECT_EQ(parse_pattern("f $ (x $ y)"), app(evar("f"), app(evar("x"), evar("y"))));
}

TEST(Parser, NamedAndNamelessBinders) {
  EXPECT_EQ(parse_pattern("exists x . x"), exists(bevar(0)));
  EXPECT_EQ(parse_pattern("exists . b0"), exists(bevar(0)));
  EXPECT_EQ(parse_pattern("exists x . exists y . x"), exists(exists(bevar(1))));
  EXPECT_EQ(parse_pattern("mu X . X"), mu(bsvar(0)));
  EXPECT_EQ(parse_pattern("∃ x. μ X. x → X"), exists(mu(imp(bevar(0), bsvar(0)))));
  // a set binder does not shift element indices
  EXPECT_EQ(parse_pattern("exists x . mu X . x"), exists(mu(bevar(0))));
}

TEST(Parser, Errors) {
  auto code_of = [](const char* s) {
    try {
      parse_pattern(s);
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::Internal;
  };
  EXPECT_EQ(code_of("a --->"), ErrorCode::Syntax);
  EXPECT_EQ(code_of("(a"), ErrorCode::Syntax);
  EXPECT_EQ(code_of("a # b"), ErrorCode::Lexical);
  EXPECT_EQ(code_of("b99999999999999999999999"), ErrorCode::MalformedIndex);
  EXPECT_EQ(code_of("a = b"), ErrorCode::UnknownNotation);
}

TEST(Parser, ErrorCarriesLocation) {
  try {
    parse_pattern("a\n  ---> )");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location().line, 2U);
  }
}

TEST(Printer, RoundTrip) {
  for (const char* s : {"a ---> b ---> c", "(a ---> b) ---> c", "a or b and c", "(a or b) and c",
                        "exists . b0 ---> Bot", "(exists . b0) ---> Bot", "mu . S0", "f $ (g $ x)",
                        "! ! a", "a <---> b <---> c", "forall . exists . b0 ---> b1",
                        "Top and ! Bot"}) {
    Pattern p = parse_pattern(s);
    EXPECT_EQ(parse_pattern(print_pattern(p)), p) << s << " printed as " << print_pattern(p);
    EXPECT_EQ(parse_pattern(print_pattern(p, false)), expand(p)) << s;
  }
}
