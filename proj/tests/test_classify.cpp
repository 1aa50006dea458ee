#include "arca/classify.hpp"

#include "arca/parser.hpp"

#include <doctest.h>

using namespace arca;

namespace {

FormulaClass classify1(const std::string& text) { return classify(parse_arca(text).formula); }

}  // namespace

TEST_SUITE_BEGIN("classify");

TEST_CASE("array-free, cardinality-free formulas are arithmetic") {
  CHECK(classify1("(declare-var x)(assert (< x N))") == FormulaClass::Arithmetic);
  CHECK(classify1("(assert (exists (x y) (and (< x y) (mod-eq 2 x 0))))") ==
        FormulaClass::Arithmetic);
}

TEST_CASE("cardinalities without arrays are constraint or better") {
  // Binder occurs outside a read: not simple, and no arrays means Constraint.
  CHECK(classify1("(declare-var z)(assert (= (card x (< x N)) z))") == FormulaClass::Constraint);
  // Binder occurs nowhere: simple flat wins over Constraint.
  CHECK(classify1("(assert (= (card x true) N))") == FormulaClass::SimpleFlat);
  // Nested cardinalities land in Constraint (counting elimination handles them).
  CHECK(classify1("(declare-var z)(assert (= (card x (= (card y (< y x)) x)) z))") ==
        FormulaClass::Constraint);
}

TEST_CASE("reads at free variables are basic") {
  CHECK(classify1("(declare-array a)(declare-var y)(assert (= (select a y) 3))") ==
        FormulaClass::Basic);
  CHECK(classify1("(declare-array a)(declare-var y)"
                  "(assert (exists (w) (and (= (select a y) w) (< w N))))") ==
        FormulaClass::Basic);
  // Read indexed at a quantified variable is not basic.
  CHECK(classify1("(declare-array a)(assert (exists (w) (= (select a w) 0)))") ==
        FormulaClass::General);
}

TEST_CASE("the write formula is simple flat") {
  CHECK(classify1("(declare-array a)(declare-array ap)(declare-var y)(declare-var z)"
                  "(assert (and (= (select ap y) z)"
                  "             (>= (card x (= (select ap x) (select a x))) (- N 1))"
                  "             (=> (< (card x (= (select ap x) (select a x))) N)"
                  "                 (distinct (select a y) z))))") == FormulaClass::SimpleFlat);
}

TEST_CASE("binder used outside reads is flat but not simple") {
  CHECK(classify1("(declare-array a)(declare-var z)"
                  "(assert (= (card x (= (+ (select a x) x) N)) z))") == FormulaClass::Flat);
}

TEST_CASE("nested reads are general") {
  CHECK(classify1("(declare-array a)(declare-var y)"
                  "(assert (= (select a (select a y)) 0))") == FormulaClass::General);
}

TEST_CASE("locally defined count results are inlined before classifying") {
  CHECK(classify1("(declare-array a)"
                  "(assert (exists (k) (and (= (card x (= (select a x) 0)) k) (< k N))))") ==
        FormulaClass::SimpleFlat);
  // Two definitions chained through the matrix.
  CHECK(classify1("(declare-array a)"
                  "(assert (exists (k j) (and (= (card x (= (select a x) 0)) k)"
                  "                           (= j (card x (= (select a x) 1)))"
                  "                           (< (+ k j) N))))") == FormulaClass::SimpleFlat);
}

TEST_CASE("cyclic count dependencies are E-flat") {
  // z appears in its own body: inlining cannot fire, the shape recognizer does.
  CHECK(classify1("(declare-array a)"
                  "(assert (exists (z) (and (= (card x (= (select a x) z)) z) (< z N))))") ==
        FormulaClass::SimpleEFlat);
  CHECK(classify1("(declare-array a)"
                  "(assert (exists (z) (and (= (card x (= (+ (select a x) x) z)) z) (< z N))))") ==
        FormulaClass::EFlat);
  // Mutual recursion between two counts.
  CHECK(classify1("(declare-array a)"
                  "(assert (exists (u v) (and (= (card x (= (select a x) v)) u)"
                  "                           (= (card x (= (select a x) u)) v))))") ==
        FormulaClass::SimpleEFlat);
}

TEST_CASE("a count body capturing an enclosing quantifier is not flat") {
  CHECK(classify1("(declare-array a)"
                  "(assert (exists (y) (and (< y N) (= (card x (= (select a x) y)) 2))))") ==
        FormulaClass::General);
}

TEST_CASE("boolean combinations preserve flat classes") {
  CHECK(classify1("(declare-array a)(declare-var z)"
                  "(assert (or (not (= (card x (= (select a x) 0)) z))"
                  "            (< (card x (= (select a x) 1)) z)))") == FormulaClass::SimpleFlat);
}

TEST_CASE("class containments") {
  using FC = FormulaClass;
  CHECK(class_within(FC::Arithmetic, FC::Constraint));
  CHECK(class_within(FC::Arithmetic, FC::Basic));
  CHECK(class_within(FC::Basic, FC::SimpleFlat));
  CHECK(class_within(FC::SimpleFlat, FC::Flat));
  CHECK(class_within(FC::SimpleFlat, FC::SimpleEFlat));
  CHECK(class_within(FC::SimpleEFlat, FC::EFlat));
  CHECK(class_within(FC::Flat, FC::EFlat));
  CHECK(class_within(FC::EFlat, FC::General));
  CHECK(class_within(FC::Constraint, FC::General));
  CHECK_FALSE(class_within(FC::Constraint, FC::EFlat));
  CHECK_FALSE(class_within(FC::Flat, FC::SimpleEFlat));
  CHECK_FALSE(class_within(FC::EFlat, FC::Flat));
  CHECK_FALSE(class_within(FC::General, FC::EFlat));
  CHECK(to_string(FC::SimpleFlat) == "SimpleFlat");
}

TEST_SUITE_END();
