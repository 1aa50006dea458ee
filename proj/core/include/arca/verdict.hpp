// Decision results shared by the satisfiability procedures.
#pragma once

#include "arca/ast.hpp"
#include "arca/eval.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace arca {

// Positive witness produced by the assignment-counting decision procedure:
// the table of surviving Boolean assignments over the atom basis, a flat
// name -> value map (multiplicities, witness vectors, scalars, N), and —
// when the solution is small enough to lay out concretely — a finite model.
struct SatCertificate {
  std::vector<std::vector<int>> sigma;  // assignment rows over the basis, 0/1
  std::map<std::string, Int> values;    // flat key -> integer table
  std::optional<FiniteModel> model;     // materialized witness when available
};

struct Verdict {
  enum class Kind { Sat, Unsat, Unknown };

  Kind kind = Kind::Unknown;
  std::optional<SatCertificate> certificate;  // present only for Sat
  std::string reason;                         // Unknown: what failed

  static Verdict sat(SatCertificate c) { return {Kind::Sat, std::move(c), {}}; }
  static Verdict unsat() { return {Kind::Unsat, std::nullopt, {}}; }
  static Verdict unknown(std::string why) { return {Kind::Unknown, std::nullopt, std::move(why)}; }

  bool is_sat() const { return kind == Kind::Sat; }
  bool is_unsat() const { return kind == Kind::Unsat; }
};

}  // namespace arca
