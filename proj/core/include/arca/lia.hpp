// Complete decision procedure for linear integer arithmetic.
//
// Three layers:
//   - LinExpr/Lit: sparse linear expressions and positive literals
//         e >= 0        (Ge)
//         e  = 0        (Eq)
//         e ≡ 0 mod m   (Cong)
//     Negation never appears: formulas are normalized into And/Or trees over
//     these literals (negated atoms are rewritten into positive form).
//   - Quantifier elimination: Cooper's method, working formula-to-formula so
//     other modules can stay in the AST world.
//   - Ground solving: DFS over the Or-structure with theory pruning; the
//     conjunction at each leaf is decided by an Omega-style procedure
//     (congruences via fresh quotient variables, equalities by coefficient
//     reduction, inequalities by Fourier-Motzkin with dark shadow and
//     splinters).  Sat answers come with a model that is re-verified against
//     the input literals before being returned.
#pragma once

#include "arca/ast.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace arca::lia {

// Sparse linear expression Σ coeffs[v]·v + constant; no zero coefficients.
struct LinExpr {
  std::map<std::string, Int> coeffs;
  Int constant = 0;

  static LinExpr of_const(Int c);
  static LinExpr of_var(const std::string& v, Int coef = 1);

  LinExpr& operator+=(const LinExpr& o);
  LinExpr& operator-=(const LinExpr& o);
  LinExpr operator+(const LinExpr& o) const;
  LinExpr operator-(const LinExpr& o) const;
  LinExpr scaled(const Int& k) const;

  Int coeff(const std::string& v) const;
  void set_coeff(const std::string& v, Int c);
  bool is_const() const { return coeffs.empty(); }

  // Replaces v by `e` (v's coefficient distributes over e).
  LinExpr substituted(const std::string& v, const LinExpr& e) const;

  Int eval(const std::map<std::string, Int>& env) const;  // missing vars read 0
  std::string str() const;
};

enum class LitKind { Ge, Eq, Cong };

struct Lit {
  LitKind kind = LitKind::Ge;
  LinExpr expr;
  Int mod = 0;  // Cong only, >= 1

  static Lit ge(LinExpr e) { return {LitKind::Ge, std::move(e), 0}; }
  static Lit eq(LinExpr e) { return {LitKind::Eq, std::move(e), 0}; }
  static Lit cong(LinExpr e, Int m) { return {LitKind::Cong, std::move(e), std::move(m)}; }

  bool eval(const std::map<std::string, Int>& env) const;
  std::string str() const;
};

// Negation-free Boolean structure over literals.
struct NForm {
  enum class Kind { Lit, And, Or };
  Kind kind = Kind::Lit;
  Lit lit;
  std::vector<NForm> kids;

  static NForm of(Lit l);
  static NForm conj(std::vector<NForm> kids);  // empty -> true literal
  static NForm disj(std::vector<NForm> kids);  // empty -> false literal

  bool eval(const std::map<std::string, Int>& env) const;
};

using Model = std::map<std::string, Int>;

// Conversion.  Both throw std::invalid_argument on array reads, cardinality
// terms, or (for to_nnf) quantifiers — eliminate those first.
LinExpr linearize(const TermPtr& t);
NForm to_nnf(const FormulaPtr& f);

// Rebuilds a linear expression as a term; names in `params` come back as
// parameter symbols, everything else as variables.
TermPtr to_term(const LinExpr& e, const std::set<std::string>& params);

// Decides a conjunction of literals; the heart of the ground solver.
// A returned model satisfies every input literal (checked internally).
std::optional<Model> solve_lits(const std::vector<Lit>& lits);

// Decides an NForm (DFS over Or nodes + solve_lits).
std::optional<Model> solve_nform(const NForm& f);

// Cooper quantifier elimination for one variable: given φ quantifier-free,
// returns an x-free NForm equivalent to ∃x φ.
NForm eliminate_var(const std::string& x, const NForm& f);

// Formula-level interface ----------------------------------------------------

// Replaces every quantifier by its Cooper elimination, bottom-up.  Input must
// be arithmetic (no reads, no cardinalities); output is quantifier-free and
// keeps parameters as parameters.
FormulaPtr eliminate_quantifiers(const FormulaPtr& f);

// Full decision: quantifier elimination, then ground search.  The model
// covers every free variable and parameter of f (absent symbols mean 0).
std::optional<Model> solve(const FormulaPtr& f);

}  // namespace arca::lia
