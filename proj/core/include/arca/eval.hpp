// Finite-model evaluation.  A model fixes N, integer values for the scalar
// symbols, and array contents on [0, N); reads outside that window are 0.
//
// Quantifiers range over a finite interval [-B, max(B, N-1)] where B comes
// from the caller, so evaluation under quantifiers is only an approximation;
// callers that rely on it (the bounded-model search) pick B to match their
// own search bounds.
#pragma once

#include "arca/ast.hpp"

#include <map>
#include <optional>
#include <stdexcept>
#include <string>

namespace arca {

struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FiniteModel {
  Int n = 0;                                         // value of N
  std::map<std::string, Int> values;                 // scalar vars and params
  std::map<std::string, std::map<Int, Int>> arrays;  // per-array sparse contents

  Int read(const std::string& array, const Int& index) const {
    if (index < 0 || index >= n) return 0;
    auto a = arrays.find(array);
    if (a == arrays.end()) return 0;
    auto v = a->second.find(index);
    return v == a->second.end() ? Int(0) : v->second;
  }
};

struct EvalOptions {
  // Quantified variables range over [-quant_bound, max(hi, N-1)] where hi is
  // quant_hi when set and quant_bound otherwise.  The split lets a caller
  // widen only the upper end (the model-search harness reaches up to its
  // largest candidate N).  Unset quant_bound: evaluating a quantifier is an
  // error.
  std::optional<Int> quant_bound;
  std::optional<Int> quant_hi;
};

Int eval_term(const TermPtr& t, const FiniteModel& m, const EvalOptions& opts = {});
bool eval_finite(const FormulaPtr& f, const FiniteModel& m, const EvalOptions& opts = {});

std::string to_string(const FiniteModel& m);

}  // namespace arca
