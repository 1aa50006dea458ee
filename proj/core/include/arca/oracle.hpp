// Bounded brute-force model search: the ground-truth engine the test suites
// compare every decision procedure against.
//
// The search is exhaustive and deterministic within its bounds, so a hit is
// a genuine model (it passed eval_finite), while a miss only means "no model
// this small" — a one-sided contract.  Quantified subformulas are evaluated
// over [-quant-bound, max(n-max, quant-bound)], which is sound exactly for
// formulas whose relevant witnesses stay in that window; the generators used
// by the test suites respect it.
#pragma once

#include "arca/ast.hpp"
#include "arca/eval.hpp"
#include "arca/verdict.hpp"

#include <optional>
#include <string>

namespace arca::oracle {

struct Bounds {
  Int n_max = 3;        // N ranges over [0, n_max]
  Int value_bound = 2;  // scalars and array entries range over [-B, B]

  // Range for quantified variables; defaults to value_bound.
  std::optional<Int> quant_bound;

  // Upper limit on the number of candidate models; larger spaces are refused
  // (std::runtime_error) rather than silently searched forever.
  Int candidate_cap = 10'000'000;
};

// First model of `f` within `b`, in enumeration order (N ascending, then
// values lexicographic), or nullopt when none exists within the bounds.
std::optional<FiniteModel> find_model(const FormulaPtr& f, const Bounds& b = {});

// Outcome of pitting a solver verdict against the bounded search.
struct CrosscheckReport {
  bool contradiction = false;         // solver said Unsat, bounded model exists
  bool certificate_mismatch = false;  // Sat certificate's model falsifies f
  bool agreement = false;             // both sides exhibit satisfaction
  std::optional<FiniteModel> oracle_model;
  std::string note;

  bool flagged() const { return contradiction || certificate_mismatch; }
};

// Checks `v` against the bounded search.  Unsat is refuted by any bounded
// model; Sat is corroborated by the certificate's model when it carries one
// (even beyond the search bounds) and otherwise by a bounded search; oracle
// silence against a Sat verdict is consistent, not a flag.
CrosscheckReport crosscheck(const FormulaPtr& f, const Verdict& v, const Bounds& b = {});

}  // namespace arca::oracle
