#include "arca/ast.hpp"
#include "arca/subst.hpp"

#include <doctest.h>

using namespace arca;

TEST_SUITE_BEGIN("ast");

TEST_CASE("printing follows the surface syntax") {
  auto t = mk_add(mk_var("x"), mk_mul(3, mk_read("a", mk_var("y"))));
  CHECK(to_string(t) == "(+ x (* 3 (select a y)))");

  auto f = mk_lt(mk_count("x", mk_eq(mk_read("a", mk_var("x")), mk_num(0))), mk_param("N"));
  CHECK(to_string(f) == "(< (card x (= (select a x) 0)) N)");

  CHECK(to_string(mk_num(-5)) == "-5");
  CHECK(to_string(mk_exists("w", mk_eq(mk_var("w"), mk_num(1)))) == "(exists (w) (= w 1))");
  CHECK(to_string(mk_cong(4, mk_var("x"), mk_num(2))) == "(mod-eq 4 x 2)");
}

TEST_CASE("constructor folds") {
  CHECK(to_string(mk_mul(1, mk_var("x"))) == "x");
  CHECK(to_string(mk_mul(0, mk_var("x"))) == "0");
  CHECK(to_string(mk_add(std::vector<TermPtr>{})) == "0");
  CHECK(to_string(mk_add(std::vector<TermPtr>{mk_var("x")})) == "x");

  auto f = mk_lt(mk_var("x"), mk_var("y"));
  CHECK(mk_not(mk_not(f)).get() == f.get());  // double negation collapses
  CHECK(is_true(mk_and(std::vector<FormulaPtr>{})));
  CHECK(mk_and(std::vector<FormulaPtr>{f}).get() == f.get());
}

TEST_CASE("derived connectives desugar to the six kinds") {
  auto a = mk_lt(mk_var("x"), mk_num(1));
  auto b = mk_eq(mk_var("y"), mk_num(2));
  CHECK(to_string(mk_or(a, b)) == "(not (and (not (< x 1)) (not (= y 2))))");
  CHECK(to_string(mk_implies(a, b)) == "(not (and (< x 1) (not (= y 2))))");
  CHECK(to_string(mk_le(mk_var("x"), mk_var("y"))) == "(not (< y x))");
  CHECK(to_string(mk_forall("w", a)) == "(not (exists (w) (not (< x 1))))");
}

TEST_CASE("structural comparison is a total order") {
  auto a = mk_lt(mk_var("x"), mk_num(1));
  auto b = mk_lt(mk_var("x"), mk_num(2));
  auto c = mk_eq(mk_var("x"), mk_num(1));
  CHECK(equal(a, mk_lt(mk_var("x"), mk_num(1))));
  CHECK(compare(a, b) != 0);
  CHECK(compare(a, b) == -compare(b, a));
  CHECK(compare(a, c) != 0);
  CHECK(compare(a, a) == 0);
}

TEST_CASE("rewrite keeps unchanged subtrees shared") {
  auto f = mk_and(mk_lt(mk_var("x"), mk_num(1)), mk_eq(mk_var("y"), mk_num(2)));
  auto same = rewrite(f, nullptr, nullptr);
  CHECK(same.get() == f.get());

  // Replacing y leaves the first conjunct's nodes intact.
  auto g = rewrite(
      f,
      [](const TermPtr& t, const std::vector<std::string>&) -> TermPtr {
        if (t->kind == TermKind::Var && t->name == "y") return mk_var("w");
        return t;
      },
      nullptr);
  CHECK(to_string(g) == "(and (< x 1) (= w 2))");
  CHECK(g->args[0].get() == f->args[0].get());
}

TEST_CASE("rewrite reports enclosing binders") {
  auto f = mk_eq(mk_count("x", mk_exists("y", mk_lt(mk_var("x"), mk_var("y")))), mk_var("z"));
  std::vector<std::vector<std::string>> seen;
  visit(
      f,
      [&](const Term& t, const std::vector<std::string>& bound) {
        if (t.kind == TermKind::Var) seen.push_back(bound);
      },
      nullptr);
  // Occurrences in preorder: x (under card+exists), y (same), z (top level).
  REQUIRE(seen.size() == 3);
  CHECK(seen[0] == std::vector<std::string>{"x", "y"});
  CHECK(seen[1] == std::vector<std::string>{"x", "y"});
  CHECK(seen[2].empty());
}

TEST_CASE("conjuncts_of flattens nested conjunctions") {
  auto a = mk_lt(mk_var("x"), mk_num(1));
  auto b = mk_eq(mk_var("y"), mk_num(2));
  auto c = mk_lt(mk_num(0), mk_var("z"));
  auto f = mk_and(mk_and(a, b), c);
  auto parts = conjuncts_of(f);
  REQUIRE(parts.size() == 3);
  CHECK(equal(parts[0], a));
  CHECK(equal(parts[1], b));
  CHECK(equal(parts[2], c));
  CHECK(conjuncts_of(a).size() == 1);
}

TEST_CASE("free_symbols distinguishes vars, params, arrays") {
  // ♯{x | a(x)=y} = z: vars {y,z}, arrays {a}.
  auto f = mk_eq(mk_count("x", mk_eq(mk_read("a", mk_var("x")), mk_var("y"))), mk_var("z"));
  auto fs = free_symbols(f);
  CHECK(fs.vars == std::set<std::string>{"y", "z"});
  CHECK(fs.arrays == std::set<std::string>{"a"});
  CHECK(fs.params.empty());

  auto g = mk_exists("y", mk_lt(mk_var("y"), mk_param("N")));
  auto gs = free_symbols(g);
  CHECK(gs.vars.empty());
  CHECK(gs.params == std::set<std::string>{"N"});

  auto h = mk_lt(mk_add(mk_var("x"), mk_param("M")), mk_param("N"));
  auto hs = free_symbols(h);
  CHECK(hs.vars == std::set<std::string>{"x"});
  CHECK(hs.params == std::set<std::string>{"M", "N"});
}

TEST_CASE("substitute avoids capture") {
  // (x < N)[y+1/x] → y+1 < N
  auto f = mk_lt(mk_var("x"), mk_param("N"));
  auto g = substitute(f, "x", mk_add(mk_var("y"), mk_num(1)));
  CHECK(to_string(g) == "(< (+ y 1) N)");

  // (∃y. x < y)[y/x]: the binder is renamed, y stays free.
  auto h = mk_exists("y", mk_lt(mk_var("x"), mk_var("y")));
  auto r = substitute(h, "x", mk_var("y"));
  REQUIRE(r->kind == FormulaKind::Exists);
  CHECK(r->var != "y");
  CHECK(to_string(r->args[0]) == "(< y " + r->var + ")");

  // Bound occurrences are untouched.
  auto c = mk_eq(mk_count("x", mk_eq(mk_read("a", mk_var("x")), mk_var("x"))), mk_var("z"));
  CHECK(substitute(c, "x", mk_num(0)).get() == c.get());
}

TEST_CASE("refresh_binders renames every binder and nothing else") {
  auto f = mk_and(mk_eq(mk_count("x", mk_lt(mk_var("x"), mk_var("y"))), mk_var("z")),
                  mk_exists("w", mk_lt(mk_var("w"), mk_var("y"))));
  FreshNames fresh;
  fresh.seed(f);
  auto g = refresh_binders(f, fresh);
  CHECK(alpha_equal(f, g));
  CHECK(!equal(f, g));
  // Free variables are untouched.
  auto fs = free_symbols(g);
  CHECK(fs.vars == std::set<std::string>{"y", "z"});
}

TEST_CASE("inline_count_definitions applies the one-point rule") {
  // ∃k (♯{x | a(x)=0} = k ∧ k < N)  →  ♯{x | a(x)=0} < N
  auto card = mk_count("x", mk_eq(mk_read("a", mk_var("x")), mk_num(0)));
  auto f = mk_exists("k", mk_and(mk_eq(card, mk_var("k")), mk_lt(mk_var("k"), mk_param("N"))));
  auto g = inline_count_definitions(f);
  CHECK(to_string(g) == "(< (card x (= (select a x) 0)) N)");

  // Self-referential definitions are left alone.
  auto cyc = mk_exists(
      "z", mk_eq(mk_count("x", mk_eq(mk_read("a", mk_var("x")), mk_var("z"))), mk_var("z")));
  CHECK(inline_count_definitions(cyc).get() == cyc.get());
}

TEST_CASE("simplify_ground folds constant atoms") {
  auto f = mk_and(mk_lt(mk_num(0), mk_num(1)), mk_eq(mk_var("x"), mk_num(2)));
  CHECK(to_string(simplify_ground(f)) == "(= x 2)");
  CHECK(is_false(simplify_ground(mk_eq(mk_num(0), mk_num(3)))));
  CHECK(is_true(simplify_ground(mk_not(mk_lt(mk_num(2), mk_num(1))))));
  CHECK(is_true(simplify_ground(mk_cong(3, mk_num(7), mk_num(1)))));
  CHECK(is_false(simplify_ground(mk_exists("x", mk_lt(mk_num(1), mk_num(0))))));
}

TEST_SUITE_END();
