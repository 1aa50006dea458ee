// Immutable AST for linear integer terms and formulas with array reads and
// cardinality terms.  Nodes are shared_ptr<const ...>; every transformation
// builds new nodes and reuses unchanged subtrees.
#pragma once

#include "arca/ints.hpp"

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace arca {

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

enum class TermKind { Numeral, Var, Param, Add, Neg, Mul, Read, Count };
enum class FormulaKind { Lt, Eq, Cong, And, Not, Exists };

struct Term {
  TermKind kind{};
  Int num;                    // Numeral: value.  Mul: coefficient.
  std::string name;           // Var/Param: symbol.  Read: array.  Count: bound var.
  std::vector<TermPtr> args;  // Add: >=2 children.  Neg/Mul: 1.  Read: index.
  FormulaPtr body;            // Count: body formula.
};

struct Formula {
  FormulaKind kind{};
  Int mod;                       // Cong: modulus >= 1.
  TermPtr lhs, rhs;              // Lt/Eq/Cong operands.
  std::vector<FormulaPtr> args;  // And: >=2 children.  Not: 1.  Exists: 1 (body).
  std::string var;               // Exists: bound variable.
};

// --- constructors ---------------------------------------------------------

TermPtr mk_num(Int v);
TermPtr mk_var(std::string name);
TermPtr mk_param(std::string name);
TermPtr mk_add(std::vector<TermPtr> args);  // empty -> 0, singleton -> itself
TermPtr mk_add(TermPtr a, TermPtr b);
TermPtr mk_neg(TermPtr a);
TermPtr mk_sub(TermPtr a, TermPtr b);
TermPtr mk_mul(Int k, TermPtr a);  // k*a; folds k=0 and k=1
TermPtr mk_read(std::string array, TermPtr index);
TermPtr mk_count(std::string var, FormulaPtr body);

FormulaPtr mk_lt(TermPtr a, TermPtr b);
FormulaPtr mk_eq(TermPtr a, TermPtr b);
FormulaPtr mk_cong(Int mod, TermPtr a, TermPtr b);  // a = b (mod `mod`), mod >= 1
FormulaPtr mk_and(std::vector<FormulaPtr> args);    // empty -> true, singleton -> itself
FormulaPtr mk_and(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_not(FormulaPtr a);  // collapses double negation
FormulaPtr mk_exists(std::string var, FormulaPtr body);

// Derived connectives (desugared to the six kinds above).
FormulaPtr mk_or(std::vector<FormulaPtr> args);
FormulaPtr mk_or(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b);
FormulaPtr mk_forall(std::string var, FormulaPtr body);
FormulaPtr mk_le(TermPtr a, TermPtr b);  // not (b < a)

FormulaPtr mk_true();   // (= 0 0)
FormulaPtr mk_false();  // (= 0 1)
bool is_true(const FormulaPtr& f);
bool is_false(const FormulaPtr& f);

// --- printing -------------------------------------------------------------

std::string to_string(const TermPtr& t);
std::string to_string(const FormulaPtr& f);

// --- structural order -----------------------------------------------------

int compare(const TermPtr& a, const TermPtr& b);
int compare(const FormulaPtr& a, const FormulaPtr& b);
bool equal(const TermPtr& a, const TermPtr& b);
bool equal(const FormulaPtr& a, const FormulaPtr& b);

struct TermLess {
  bool operator()(const TermPtr& a, const TermPtr& b) const { return compare(a, b) < 0; }
};
struct FormulaLess {
  bool operator()(const FormulaPtr& a, const FormulaPtr& b) const { return compare(a, b) < 0; }
};

// --- traversal ------------------------------------------------------------

// Bottom-up rewriting.  The callbacks see nodes whose children have already
// been rewritten, together with the names bound by enclosing binders
// (innermost last).  Returning the argument pointer keeps the node.
using TermFn = std::function<TermPtr(const TermPtr&, const std::vector<std::string>&)>;
using FormFn = std::function<FormulaPtr(const FormulaPtr&, const std::vector<std::string>&)>;

TermPtr rewrite(const TermPtr& t, const TermFn& tf, const FormFn& ff);
FormulaPtr rewrite(const FormulaPtr& f, const TermFn& tf, const FormFn& ff);

// Read-only preorder walk with the same bound-variable tracking.
using TermVisitor = std::function<void(const Term&, const std::vector<std::string>&)>;
using FormVisitor = std::function<void(const Formula&, const std::vector<std::string>&)>;

void visit(const TermPtr& t, const TermVisitor& tv, const FormVisitor& fv);
void visit(const FormulaPtr& f, const TermVisitor& tv, const FormVisitor& fv);

// Flattens nested conjunctions into a conjunct list (no other rewriting).
std::vector<FormulaPtr> conjuncts_of(const FormulaPtr& f);

size_t node_count(const FormulaPtr& f);

}  // namespace arca
