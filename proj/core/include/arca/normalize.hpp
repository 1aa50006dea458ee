// Canonicalization of flat formulas into the prenex counting form the
// solvers consume:
//
//   ∃ z̲ ( α  ∧  ♯{x | β_1} = z_1  ∧ … ∧  ♯{x | β_K} = z_K )
//
// where α is cardinality-free and never mentions a counting binder, and each
// β_l is a cardinality-free body over its binder, the free variables, and
// array reads.  `flatten` abstracts cardinality terms out of a flat formula
// into this shape; `eliminate_parameter_reads` and `simple_preprocess` then
// remove array reads at non-binder variables (by case analysis that turns
// one form into a disjunction of forms), and `make_partition` refines the
// bodies into a mutually exclusive, jointly exhaustive family.
#pragma once

#include "arca/ast.hpp"

#include <cstddef>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace arca::normalize {

// One abstracted cardinality equation ♯{binder | body} = result.
struct CardEquation {
  std::string binder;
  FormulaPtr body;
  std::string result;
};

// The prenex counting form.  `existentials` lists the ∃-prefix in binding
// order (outermost first) and always contains every card result; `vars` and
// `arrays` record the remaining free symbols for downstream passes.
struct EFlatForm {
  FormulaPtr matrix;
  std::vector<CardEquation> cards;
  std::vector<std::string> existentials;
  std::set<std::string> vars;
  std::set<std::string> arrays;

  FormulaPtr to_formula() const;  // rebuilds the displayed shape
};

// Result-variable dependency graph: an arc j → i whenever card i's result
// variable occurs in card j's body.  Abstraction of a flat formula always
// yields an arc-free graph; the direct EFlatForm API may produce cycles.
struct DependencyGraph {
  std::vector<std::string> nodes;                  // card results, in order
  std::vector<std::pair<size_t, size_t>> arcs;     // (j, i) index pairs
  bool acyclic() const;
};

DependencyGraph dependency_graph(const EFlatForm& e);

// A form together with the trail of case-analysis choices that produced it.
struct GuessedForm {
  EFlatForm form;
  std::vector<std::string> guesses;  // human-readable, in decision order
};

// Abstracts every cardinality term of a flat formula behind a fresh result
// variable (φ with t in term position ⟺ ∃z (t = z ∧ φ with z there), applied
// until no cardinality term remains).  Syntactically identical bodies share
// one result variable.  Accepts arithmetic, basic, simple-flat, and flat
// inputs; throws std::invalid_argument for anything else.
EFlatForm flatten(const FormulaPtr& f);

// `flatten` when the input is flat; otherwise matches an explicit
// ∃-prefix + matrix + card-equations shape (which may have a cyclic
// dependency graph).  Throws std::invalid_argument when neither applies.
EFlatForm to_eflat(const FormulaPtr& f);

// Removes reads at non-binder variables for the general path.  Reads at a
// result variable z are folded through a fresh alias variable (y = z); a
// read index y is then split into the case y ≥ N, where every read at y
// collapses to 0, and the case y < N, where each array read at y becomes a
// fresh value variable pinned by a one-cell cardinality
// ♯{x | x = y ∧ a(x) = u} = z′ with z′ = 1.  The union of the returned
// forms' models (under existential closure) matches the input; members whose
// matrix is ground-false are pruned.  New card bodies mention the binder
// outside reads, so the output belongs to the general path only.
std::vector<GuessedForm> eliminate_parameter_reads(const EFlatForm& e);

// Refines the K card bodies into the 2^K sign combinations
// β_σ := ⋀_l [σ(l) ? β_l : ¬β_l], replacing the original equations by fresh
// counts u_σ with z_l = Σ_{σ(l)=1} u_σ in the matrix.  The new bodies are
// pairwise inconsistent and jointly exhaustive.  Requires the input to be
// free of reads at non-binder variables; throws std::invalid_argument
// otherwise.  K = 0 inputs are returned unchanged.
EFlatForm make_partition(const EFlatForm& e);

// Preprocessing for the permutation-invariant path.  Requires every card
// body to use its binder only under reads (std::invalid_argument otherwise).
// Reads at result variables are folded as above; then each read-index
// variable is guessed against N (≥ N reads collapse to 0), surviving index
// variables are guessed into equality classes (merged or kept distinct),
// each array read at a representative becomes a fresh value variable, value
// variables are guessed into equality classes in turn, and finally each
// class of representatives with identical value rows is replaced by a
// cardinality floor ♯{x | ⋀_a a(x) = u_a} = z′ with z′ ≥ class size.  The
// disjunction of the results is equisatisfiable with the input (under
// existential closure, via a simultaneous permutation of array values), and
// every result is permutation-invariant: arrays are read only at the
// counting binder.
std::vector<GuessedForm> simple_preprocess(const EFlatForm& e);

// True when `e` is in the reduced shape the counting solvers consume: the
// matrix is purely arithmetic (no reads) and every body reads arrays only at
// its own binder and never uses the binder outside reads.
bool is_reduced(const EFlatForm& e);

// ∃-closure over the remaining free variables (then the form's own prefix);
// arrays and parameters stay free.
FormulaPtr existential_closure(const EFlatForm& e);

}  // namespace arca::normalize
