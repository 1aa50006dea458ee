// Free-symbol analysis, capture-avoiding substitution, fresh-name supply,
// alpha-canonical comparison, and ground simplification.
#pragma once

#include "arca/ast.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>

namespace arca {

struct FreeSymbols {
  std::set<std::string> vars;    // free variables
  std::set<std::string> params;  // parameters mentioned
  std::set<std::string> arrays;  // arrays mentioned
};

FreeSymbols free_symbols(const FormulaPtr& f);
FreeSymbols free_symbols(const TermPtr& t);

bool occurs_free(const FormulaPtr& f, const std::string& var);

// Supplies names of the form base!k.  The counter starts above every !k
// suffix seen in the seeds, so freshness needs no global state.
class FreshNames {
 public:
  FreshNames() = default;
  void seed(const FormulaPtr& f);
  void seed(const TermPtr& t);
  void seed_name(const std::string& name);
  std::string fresh(const std::string& base);

 private:
  long long next_ = 1;
};

// Capture-avoiding substitution of `t` for free occurrences of variable `var`.
// Binders that would capture free variables of `t` are renamed.
FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const TermPtr& t);
TermPtr substitute(const TermPtr& tm, const std::string& var, const TermPtr& t);

// Simultaneous variable renaming (used by unrolling; no capture handling —
// callers guarantee target names are fresh).
FormulaPtr rename_symbols(const FormulaPtr& f, const std::map<std::string, std::string>& vars,
                          const std::map<std::string, std::string>& arrays);

// Renames every binder in `f` to a fresh name, preserving scoping.  Used when
// a subformula is duplicated so the binder-distinctness invariant survives.
FormulaPtr refresh_binders(const FormulaPtr& f, FreshNames& fresh);

// Renames every binder to a canonical positional name, for alpha-equivalence
// comparison and deduplication keys.
FormulaPtr alpha_canonical(const FormulaPtr& f);
bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b);

// Inlines count-defining existentials: ∃v (v = (card x β) ∧ φ) becomes
// φ[(card x β)/v] when β does not mention v.  Applied bottom-up, everywhere.
FormulaPtr inline_count_definitions(const FormulaPtr& f);

// Constant folding plus short-circuiting of ground atoms; cheap and pure.
// And-children that fold to true are dropped, false children collapse the
// conjunction.  Quantifiers and non-ground atoms are left in place.
FormulaPtr simplify_ground(const FormulaPtr& f);

// Numeric value of a closed term built from numerals, if it is one.
std::optional<Int> eval_ground_term(const TermPtr& t);

}  // namespace arca
