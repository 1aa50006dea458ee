// Syntactic classification of formulas into the fragments the solvers accept.
//
//   Arithmetic   no array reads, no cardinality terms
//   Constraint   no array reads (cardinalities unrestricted)
//   Basic        arithmetic with some free variables replaced by reads a(y)
//   SimpleFlat   flat, and every cardinality binder occurs only in read indices
//   Flat         built from basic formulas by substituting cardinality terms
//                for free variables (bodies read only at their own binder or
//                at free variables)
//   SimpleEFlat  top-level ∃-prefix over matrix + cardinality equations whose
//                bodies use the binder only under reads; dependencies between
//                the count results may be cyclic
//   EFlat        as above without the binder restriction
//   General      everything else
//
// The containments: Arithmetic ⊆ Constraint; Arithmetic ⊆ Basic ⊆ SimpleFlat
// ⊆ Flat ⊆ EFlat; SimpleFlat ⊆ SimpleEFlat ⊆ EFlat; everything ⊆ General.
// classify returns the most specific class, preferring SimpleFlat over
// Constraint for array-free formulas that satisfy both.
#pragma once

#include "arca/ast.hpp"

#include <string>

namespace arca {

enum class FormulaClass {
  Arithmetic,
  Basic,
  SimpleFlat,
  Constraint,
  Flat,
  SimpleEFlat,
  EFlat,
  General,
};

FormulaClass classify(const FormulaPtr& f);

// Does `x` occur anywhere other than as a read index?  Respects shadowing by
// inner binders of the same name.
bool occurs_outside_reads(const FormulaPtr& f, const std::string& x);
bool occurs_outside_reads(const TermPtr& t, const std::string& x);

// True when every formula of class `inner` is also of class `outer`.
bool class_within(FormulaClass inner, FormulaClass outer);

std::string to_string(FormulaClass c);

}  // namespace arca
