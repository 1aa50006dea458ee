// Rewrites cardinality terms into plain linear arithmetic.
//
// A count  y = #{x | α}  (with α arithmetic and x counted over [0, N)) is
// turned into an equivalent arithmetic formula in stages:
//
//   1. quantifier elimination on α, so the body is quantifier-free;
//   2. negation removal: each negated atom becomes an exclusive disjunction
//      of positive atoms (t≠u into t<u or u<t, and so on);
//   3. a region case split over the body's atoms, so the body becomes a
//      disjoint union of atom conjunctions and the count a sum of counts,
//      one per region (arithmetically impossible regions are pruned);
//   4. per region, conjuncts not mentioning x are hoisted out of the count;
//   5. coefficient normalization: atoms k·x = t, t < k·x, k·x < t and
//      k·x ≡_n v are reduced to unit coefficient by solving the equality
//      case outright and guessing quotient/remainder or residue otherwise;
//   6. a disjunctive guess of the largest lower and smallest upper bound
//      reduces to a single interval, and the congruences are merged into one
//      modulo the lcm of their moduli;
//   7. a closed form for  y = #{x | t1 ≤ x ∧ x < t2 ∧ x ≡_n t3}.
//
// The output can contain quantifiers (they are arithmetic and can be
// eliminated separately); it never contains a count term.
#pragma once

#include "arca/ast.hpp"

#include <string>
#include <utility>
#include <vector>

namespace arca::counting {

// One count occurrence, abstracted: result_var receives #{bound_var | body}.
struct CountAtom {
  std::string result_var;  // y; must not occur in body
  std::string bound_var;   // x; the counted variable
  FormulaPtr body;         // arithmetic (no reads, no counts)
};

// A region body in its final shape: every atom mentions x with coefficient
// one.  lowers are t ≤ x, uppers are x < u, congruences are x ≡_n v; x occurs
// in none of the stored terms.  The [0,N) counting window always contributes
// one lower and one upper bound, so both lists are nonempty.
struct NormalizedConjunct {
  std::vector<TermPtr> lowers;
  std::vector<TermPtr> uppers;
  std::vector<std::pair<Int, TermPtr>> congruences;  // (modulus, v)
};

// Outcome of reducing l·x ≡_n k to unit coefficient on x.
struct NormalizedCongruence {
  bool inconsistent = false;  // gcd(l, n) does not divide k: no solution
  Int modulus = 1;            // n' = n / gcd(l, n)
  Int residue = 0;            // k' in [0, n')
};

// Reduces the congruence l·x ≡_n k (l, n ≥ 1, k any integer) to an
// equivalent x ≡_{n'} k', or reports that it has no solution.
NormalizedCongruence normalize_congruence(const Int& l, const Int& n, const Int& k);

// Closed form for  y = #{x | t1 ≤ x ∧ x < t2 ∧ x ≡_n t3}  where x occurs in
// none of t1, t2, t3.  The result is quantifier-free: it guesses the offset
// r of the first solution at or above t1 (an x-free congruence on t3) and
// pins n·y to t2 − t1 − r rounded up to the next multiple of n, or y = 0
// when the interval holds no solution.
FormulaPtr count_special_case(const TermPtr& t1, const TermPtr& t2, const Int& n,
                              const TermPtr& t3, const std::string& y);

// Arithmetic formula equivalent to  result_var = #{bound_var ∈ [0,N) | body}.
FormulaPtr eliminate_count_atom(const CountAtom& a);

// Replaces every count term in f by its arithmetic equivalent, innermost
// first.  f must not mention arrays; the result contains no count term and
// is equivalent to f over the integers.
FormulaPtr eliminate_counting(const FormulaPtr& f);

}  // namespace arca::counting
