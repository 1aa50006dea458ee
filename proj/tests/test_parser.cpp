#include "arca/parser.hpp"

#include <doctest.h>

using namespace arca;

namespace {

// Parse a file, print the conjoined formula, reparse, and compare.
void check_roundtrip(const std::string& text) {
  auto file = parse_arca(text);
  std::string printed = to_string(file.formula);
  auto exprs = read_sexprs(printed);
  REQUIRE(exprs.size() == 1);
  FreshNames fresh;
  auto again = parse_formula(exprs[0], file.symbols, fresh);
  CHECK(to_string(again) == printed);
  CHECK(equal(again, file.formula));
}

}  // namespace

TEST_SUITE_BEGIN("parser");

TEST_CASE("card equality parses to the expected tree") {
  auto file = parse_arca("(assert (= (card x (< x N)) N))");
  REQUIRE(file.asserts.size() == 1);
  CHECK(to_string(file.formula) == "(= (card x!1 (< x!1 N)) N)");
}

TEST_CASE("modulus below one is rejected") {
  CHECK_THROWS_WITH_AS(parse_arca("(assert (mod-eq 0 x x))"),
                       doctest::Contains("modulus must be >= 1"), ParseError);
  CHECK_THROWS_AS(parse_arca("(declare-var x)(assert (mod-eq -2 x x))"), ParseError);
  auto ok = parse_arca("(declare-var x)(assert (mod-eq 1 x x))");
  CHECK(to_string(ok.formula) == "(mod-eq 1 x x)");
}

TEST_CASE("nested reads parse directly") {
  auto file = parse_arca("(declare-array a)(declare-var y)(assert (= (select a (select a y)) 0))");
  CHECK(to_string(file.formula) == "(= (select a (select a y)) 0)");
}

TEST_CASE("declarations are validated") {
  CHECK_THROWS_AS(parse_arca("(declare-var N)"), ParseError);          // N is implicit
  CHECK_THROWS_AS(parse_arca("(declare-var a)(declare-array a)"), ParseError);
  CHECK_THROWS_AS(parse_arca("(declare-var x!0)"), ParseError);        // reserved suffix
  CHECK_THROWS_AS(parse_arca("(assert (< y 1))"), ParseError);         // undeclared
  CHECK_THROWS_AS(parse_arca("(declare-array a)(assert (< a 1))"), ParseError);
  CHECK_THROWS_AS(parse_arca("(declare-var x)(assert (select x 1))"), ParseError);
  CHECK_NOTHROW(parse_arca("(declare-param M)(assert (< M N))"));
}

TEST_CASE("syntax errors carry line and column") {
  try {
    parse_arca("(assert\n  (= (card 5 (< 0 N)) N))");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(doctest::String(e.what()) == doctest::Contains("variable name"));
  }
  CHECK_THROWS_AS(read_sexprs("(assert (= 1 1)"), ParseError);  // unbalanced
  CHECK_THROWS_AS(read_sexprs(")"), ParseError);
}

TEST_CASE("comments and whitespace are skipped") {
  auto file = parse_arca("; header comment\n(declare-var x) ; trailing\n(assert (< x N))\n");
  CHECK(to_string(file.formula) == "(< x N)");
}

TEST_CASE("multiple asserts conjoin in order") {
  auto file = parse_arca("(declare-var x)(assert (< x N))(assert (< 0 x))");
  CHECK(to_string(file.formula) == "(and (< x N) (< 0 x))");
  auto empty = parse_arca("(declare-var x)");
  CHECK(is_true(empty.formula));
}

TEST_CASE("binders are renamed apart") {
  auto file = parse_arca(
      "(declare-array a)"
      "(assert (and (= (card x (= (select a x) 0)) N)"
      "             (exists (x) (= (select a x) 1))))");
  auto c = file.formula->args[0]->lhs;  // the card term
  auto e = file.formula->args[1];       // the exists
  REQUIRE(c->kind == TermKind::Count);
  REQUIRE(e->kind == FormulaKind::Exists);
  CHECK(c->name != e->var);
}

TEST_CASE("quantifier lists nest left to outside") {
  auto file = parse_arca("(assert (exists (x y) (< x y)))");
  auto f = file.formula;
  REQUIRE(f->kind == FormulaKind::Exists);
  REQUIRE(f->args[0]->kind == FormulaKind::Exists);
  CHECK(to_string(f) == "(exists (x!1) (exists (y!2) (< x!1 y!2)))");

  // mk_not collapses the double negation in ¬(⇒-desugaring).
  auto all = parse_arca("(assert (forall (x) (=> (< x 0) (< x N))))");
  CHECK(to_string(all.formula) == "(not (exists (x!1) (and (< x!1 0) (not (< x!1 N)))))");
}

TEST_CASE("comparison sugar orients around strict less-than") {
  auto file = parse_arca("(declare-var x)(declare-var y)(assert (and (<= x y) (> x y) (>= x y)))");
  CHECK(to_string(file.formula) == "(and (not (< y x)) (< y x) (not (< x y)))");
  auto d = parse_arca("(declare-var x)(assert (distinct x 3))");
  CHECK(to_string(d.formula) == "(not (= x 3))");
}

TEST_CASE("terms parse with strict arities") {
  CHECK_THROWS_AS(parse_arca("(declare-var x)(assert (= (+ x) 0))"), ParseError);
  CHECK_THROWS_AS(parse_arca("(declare-var x)(assert (= (* x 2) 0))"), ParseError);
  CHECK_THROWS_AS(parse_arca("(declare-var x)(assert (= (- ) 0))"), ParseError);
  CHECK_THROWS_AS(parse_arca("(declare-var x)(assert (or (< x 1)))"), ParseError);
  auto ok = parse_arca("(declare-var x)(assert (= (+ x 1 2) (- (- x) (* -2 x))))");
  CHECK(to_string(ok.formula) == "(= (+ x 1 2) (+ (- x) (- (* -2 x))))");
}

TEST_CASE("parse then print round-trips") {
  check_roundtrip("(assert (= (card x (< x N)) N))");
  check_roundtrip(
      "(declare-array a)(declare-var z)"
      "(assert (< (card x (= (select a x) z)) N))(assert (<= 0 z))");
  check_roundtrip(
      "(declare-array a)(declare-array b)(declare-var y)"
      "(assert (iff (= (card x (= (select a x) (select b x))) N)"
      "             (forall (w) (=> (and (<= 0 w) (< w N)) (= (select a w) (select b w))))))"
      "(assert (exists (u v) (and (< u y) (< v u) (mod-eq 3 v y))))");
  check_roundtrip(
      "(declare-var y)"
      "(assert (or (distinct y 0) (> y (card x (exists (q) (= x (* 2 q)))))))");
}

TEST_CASE("iff duplication keeps binders distinct") {
  auto file = parse_arca(
      "(declare-array a)"
      "(assert (iff (= (card x (= (select a x) 0)) N) (< (card x (= (select a x) 1)) N)))");
  std::set<std::string> binders;
  size_t total = 0;
  visit(
      file.formula,
      [&](const Term& t, const std::vector<std::string>&) {
        if (t.kind == TermKind::Count) {
          binders.insert(t.name);
          ++total;
        }
      },
      nullptr);
  CHECK(total == 4);          // each card appears twice after desugaring
  CHECK(binders.size() == 4);  // all four binders distinct
}

TEST_SUITE_END();
