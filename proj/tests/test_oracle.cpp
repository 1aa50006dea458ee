// Bounded model search: enumeration order, exhaustiveness, the candidate
// cap, the quantifier window, and crosschecks against solver verdicts.
#include "doctest.h"

#include "arca/eval.hpp"
#include "arca/lia.hpp"
#include "arca/oracle.hpp"
#include "arca/parser.hpp"
#include "generators.hpp"

#include <optional>
#include <string>

using namespace arca;
using oracle::Bounds;
using oracle::CrosscheckReport;

namespace {

FormulaPtr parse1(const std::string& text) { return parse_arca(text).formula; }

// The write-as-formula idiom: b agrees with a everywhere except possibly at
// y, where it holds z.
const char* kWriteFormula =
    "(declare-array a) (declare-array b) (declare-var y) (declare-var z)"
    "(assert (= (select b y) z))"
    "(assert (>= (card x (= (select b x) (select a x))) (- N 1)))"
    "(assert (=> (< (card x (= (select b x) (select a x))) N)"
    "            (not (= (select a y) z))))";

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("vacuous count: the very first candidate is a model") {
  auto f = parse1("(assert (= (card x true) N))");
  auto m = oracle::find_model(f);
  REQUIRE(m.has_value());
  CHECK(m->n == 0);
  CHECK(m->values.empty());
  CHECK(m->arrays.empty());
  CHECK(eval_finite(f, *m));
}

TEST_CASE("write formula is satisfiable, its negation at the write point is not") {
  auto sat = parse_arca(kWriteFormula);
  auto m = oracle::find_model(sat.formula);
  REQUIRE(m.has_value());
  CHECK(eval_finite(sat.formula, *m));

  auto unsat = parse_arca(std::string(kWriteFormula) +
                          "(assert (not (= (select b y) z)))");
  CHECK(!oracle::find_model(unsat.formula).has_value());
}

TEST_CASE("count pinned to N forces a full array") {
  auto f = parse1(
      "(declare-array a)"
      "(assert (>= N 1))"
      "(assert (= (card x (= (select a x) 1)) N))");
  auto m = oracle::find_model(f);
  REQUIRE(m.has_value());
  CHECK(m->n == 1);
  REQUIRE(m->arrays.count("a"));
  CHECK(m->arrays.at("a").at(0) == 1);
}

TEST_CASE("enumeration order: N ascending, then slots lexicographic") {
  // Scalars are ordered by name (v before w) with the earlier slot more
  // significant, so v+w = 3 is first hit at v=1, w=2.
  auto f = parse1("(declare-var v) (declare-var w) (assert (= (+ v w) 3))");
  auto m = oracle::find_model(f);
  REQUIRE(m.has_value());
  CHECK(m->values.at("v") == 1);
  CHECK(m->values.at("w") == 2);

  // Deterministic: a second run reproduces the same model.
  auto again = oracle::find_model(f);
  REQUIRE(again.has_value());
  CHECK(to_string(*again) == to_string(*m));
}

TEST_CASE("exhaustive within bounds: a model at the far corner is found") {
  auto f = parse1("(declare-var v) (assert (and (= v 2) (= N 3)))");
  auto m = oracle::find_model(f);
  REQUIRE(m.has_value());
  CHECK(m->n == 3);
  CHECK(m->values.at("v") == 2);
}

TEST_CASE("candidate cap: the boundary is exact") {
  // One scalar, no arrays, n_max = 0: exactly (2B+1)^1 = 5 candidates.
  auto f = parse1("(declare-var v) (assert (and (= v 2) (= N 0)))");
  Bounds five;
  five.n_max = 0;
  five.candidate_cap = 5;
  auto m = oracle::find_model(f, five);
  REQUIRE(m.has_value());
  CHECK(m->values.at("v") == 2);

  Bounds four = five;
  four.candidate_cap = 4;
  CHECK_THROWS_AS(oracle::find_model(f, four), std::runtime_error);

  // Arrays multiply per N: with two arrays and n_max = 1 the space is
  // 5^0 + 5^2 = 26 candidates.
  auto g = parse1(
      "(declare-array a) (declare-array b)"
      "(assert (= (select a 0) (select b 0)))");
  Bounds sized;
  sized.n_max = 1;
  sized.candidate_cap = 26;
  CHECK(oracle::find_model(g, sized).has_value());
  sized.candidate_cap = 25;
  CHECK_THROWS_AS(oracle::find_model(g, sized), std::runtime_error);
}

TEST_CASE("bad bounds are rejected") {
  auto f = parse1("(assert (= N 0))");
  Bounds b;
  b.n_max = -1;
  CHECK_THROWS_AS(oracle::find_model(f, b), std::invalid_argument);
  b = Bounds{};
  b.value_bound = -2;
  CHECK_THROWS_AS(oracle::find_model(f, b), std::invalid_argument);
  b = Bounds{};
  b.candidate_cap = 0;
  CHECK_THROWS_AS(oracle::find_model(f, b), std::invalid_argument);
}

TEST_CASE("quantifier window reaches up to n_max and down to -quant_bound") {
  // x = N needs a witness at N = 3, above the default value bound of 2.
  auto f = parse1("(assert (and (= N 3) (exists (x) (= x N))))");
  auto m = oracle::find_model(f);
  REQUIRE(m.has_value());
  CHECK(m->n == 3);

  // The lower end stops at -quant_bound: a witness at -3 is out of the
  // default window but reachable once the bound is raised.
  auto g = parse1("(assert (exists (x) (= x (- 3))))");
  CHECK(!oracle::find_model(g).has_value());
  Bounds wide;
  wide.quant_bound = Int(3);
  CHECK(oracle::find_model(g, wide).has_value());
}

TEST_CASE("out-of-window reads evaluate to zero") {
  auto f = parse1("(declare-array a) (assert (= (select a 5) 0))");
  auto m = oracle::find_model(f);
  REQUIRE(m.has_value());
  CHECK(m->n == 0);
}

TEST_CASE("crosscheck refutes a wrong unsat and accepts a right one") {
  auto sat = parse1("(declare-var v) (assert (= v 1))");
  auto r = oracle::crosscheck(sat, Verdict::unsat());
  CHECK(r.contradiction);
  CHECK(r.flagged());
  REQUIRE(r.oracle_model.has_value());
  CHECK(eval_finite(sat, *r.oracle_model));

  auto unsat = parse1("(declare-var v) (assert (and (< v 0) (< 0 v)))");
  auto ok = oracle::crosscheck(unsat, Verdict::unsat());
  CHECK(!ok.flagged());
  CHECK(!ok.agreement);
  CHECK(!ok.note.empty());
}

TEST_CASE("crosscheck corroborates sat by search or by certificate") {
  auto f = parse1("(declare-var v) (assert (= v 1))");
  auto r = oracle::crosscheck(f, Verdict::sat({}));
  CHECK(r.agreement);
  CHECK(!r.flagged());
  REQUIRE(r.oracle_model.has_value());

  // A certificate model beyond the search bounds still counts: N = 5 is
  // above n_max = 3, so only the supplied witness can confirm it.
  auto big = parse1("(assert (= N 5))");
  SatCertificate cert;
  cert.model = FiniteModel{};
  cert.model->n = 5;
  auto viaCert = oracle::crosscheck(big, Verdict::sat(cert));
  CHECK(viaCert.agreement);
  CHECK(!viaCert.flagged());

  // Without the certificate the oracle stays silent — consistent, no flag.
  auto silent = oracle::crosscheck(big, Verdict::sat({}));
  CHECK(!silent.agreement);
  CHECK(!silent.flagged());
}

TEST_CASE("crosscheck flags a certificate that falsifies the formula") {
  auto f = parse1("(assert false)");
  SatCertificate cert;
  cert.model = FiniteModel{};
  auto r = oracle::crosscheck(f, Verdict::sat(cert));
  CHECK(r.certificate_mismatch);
  CHECK(r.flagged());
  CHECK(!r.agreement);
}

TEST_CASE("crosscheck passes unknown verdicts through") {
  auto f = parse1("(assert false)");
  auto r = oracle::crosscheck(f, Verdict::unknown("backend died"));
  CHECK(!r.flagged());
  CHECK(!r.agreement);
}

TEST_CASE("random crosschecks against the arithmetic engine never contradict") {
  testgen::ArithGen gen(0xa11ce, {"x", "y", "z"});
  int sats = 0, unsats = 0;
  for (int round = 0; round < 40; ++round) {
    // Conjunctions of several atoms give a healthy sat/unsat mix.
    std::vector<FormulaPtr> parts;
    for (int i = 0; i < 5; ++i) parts.push_back(gen.atom());
    auto f = mk_and(std::move(parts));
    auto solved = lia::solve(f);
    Verdict v = Verdict::unsat();
    if (solved) {
      SatCertificate cert;
      cert.model = FiniteModel{};
      for (const auto& [name, val] : *solved) cert.model->values[name] = val;
      v = Verdict::sat(std::move(cert));
      ++sats;
    } else {
      ++unsats;
    }
    auto r = oracle::crosscheck(f, v);
    CHECK(!r.flagged());
    if (v.is_sat()) CHECK(r.agreement);
  }
  // The generator should exercise both outcomes.
  CHECK(sats > 5);
  CHECK(unsats > 5);
}

}  // TEST_SUITE
