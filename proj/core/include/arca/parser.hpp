// S-expression reader and the surface-syntax parser for formula files.
//
// Surface forms:
//   toplevel:  (declare-param p) (declare-var v) (declare-array a) (assert F)
//   formulas:  and or not => iff exists forall < <= > >= = distinct mod-eq
//   terms:     literals, symbols, (+ ...), (- t), (- t u), (* k t),
//              (select a t), (card x F)
//
// Bound variables are alpha-renamed on construction (x becomes x!k, k a
// per-parse counter), so every binder in a parsed formula is distinct.
#pragma once

#include "arca/ast.hpp"
#include "arca/subst.hpp"
#include "arca/symbols.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace arca {

struct ParseError : std::runtime_error {
  int line = 0, col = 0;
  ParseError(const std::string& msg, int line_, int col_)
      : std::runtime_error(msg + " (line " + std::to_string(line_) + ", col " + std::to_string(col_) + ")"),
        line(line_),
        col(col_) {}
};

struct SExpr {
  bool atom = false;
  std::string text;         // atom spelling
  std::vector<SExpr> items; // list elements
  int line = 0, col = 0;

  bool is_list() const { return !atom; }
  bool is_symbol() const;  // atom that is not an integer literal
  bool is_number() const;
};

// Reads every toplevel s-expression; ';' starts a comment to end of line.
std::vector<SExpr> read_sexprs(const std::string& text);

// Parses one formula against the declared symbols.  `fresh` numbers the
// binders; share one instance across formulas that will be combined.
FormulaPtr parse_formula(const SExpr& e, const SymbolTable& table, FreshNames& fresh);
TermPtr parse_term(const SExpr& e, const SymbolTable& table, FreshNames& fresh);

struct ArcaFile {
  SymbolTable symbols;
  std::vector<FormulaPtr> asserts;
  FormulaPtr formula;  // conjunction of the asserts
};

ArcaFile parse_arca(const std::string& text);

}  // namespace arca
