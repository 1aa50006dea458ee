// Solver boundary: SMT-LIB2 script emission, external solver processes, and
// incremental sessions.
//
// Two interchangeable backends sit behind the Session interface:
//   - a process session speaking SMT-LIB2 over pipes to an external solver
//     (anything conformant works; the bundled arca-smt binary is the default
//     choice when no system solver is installed), and
//   - a builtin session that decides formulas with the in-process arithmetic
//     engine, no subprocess involved.
// Both enforce the global axiom N >= 0.
#pragma once

#include "arca/ast.hpp"
#include "arca/symbols.hpp"

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace arca::smt {

struct SolverConfig {
  std::string executable;         // empty: use the builtin engine
  std::vector<std::string> args;  // extra argv entries before stdin is piped
  long long timeout_ms = 30000;   // per run / per check; must be > 0
  std::string logic;              // empty: auto (QF_LIA / LIA; ALL for sessions)
};

struct SolverVerdict {
  enum class Kind { Sat, Unsat, Unknown, ProcessError };
  Kind kind = Kind::Unknown;
  std::map<std::string, Int> values;  // Sat: one entry per declared constant
  std::string detail;                 // Unknown / ProcessError explanation

  static SolverVerdict sat(std::map<std::string, Int> vals) {
    return {Kind::Sat, std::move(vals), ""};
  }
  static SolverVerdict unsat() { return {Kind::Unsat, {}, ""}; }
  static SolverVerdict unknown(std::string why) {
    return {Kind::Unknown, {}, std::move(why)};
  }
  static SolverVerdict error(std::string why) {
    return {Kind::ProcessError, {}, std::move(why)};
  }

  bool is_sat() const { return kind == Kind::Sat; }
  bool is_unsat() const { return kind == Kind::Unsat; }
};

// Renders an array-free, cardinality-free formula as a complete SMT-LIB2
// script: set-logic (the override if nonempty, else QF_LIA, or LIA when
// quantifiers are present), declare-const for every parameter and variable
// (declared in `symbols` or free in φ), the axiom (assert (>= N 0)), the
// assertion, check-sat, and get-value over all constants.  Congruences are
// rendered as (= (mod (- t u) n) 0).  Byte-deterministic for a fixed input.
// Throws std::invalid_argument on array reads or cardinality terms.
std::string emit_script(const FormulaPtr& f, const SymbolTable& symbols,
                        const std::string& logic_override = "");

// Runs one script through the configured solver process, stdin to stdout.
// Timeouts give Unknown("timeout"); a missing binary, a crash, or output
// without a verdict gives ProcessError.
SolverVerdict run_solver(const std::string& script, const SolverConfig& cfg);

// Incremental solving. assert_formula declares unseen symbols on the fly;
// declarations and assertions follow standard push/pop scoping.  check() on
// the process backend desynchronizes on timeout, so the session is dead
// afterwards (ProcessError from then on); the builtin backend cannot time
// out.  A session is single-owner: never share one across threads.
class Session {
 public:
  virtual ~Session() = default;
  virtual void assert_formula(const FormulaPtr& f) = 0;
  virtual void push() = 0;
  virtual void pop() = 0;
  virtual SolverVerdict check() = 0;
};

// Process-backed when cfg.executable is nonempty, builtin otherwise.
std::unique_ptr<Session> open_session(const SolverConfig& cfg);

// The SMT-LIB2 interpreter behind the arca-smt tool: reads commands from
// `in`, answers on `out` (flushed per response), decides with the builtin
// engine.  Supports the LIA fragment the emitter produces plus the usual
// incremental commands (push/pop/reset/echo/exit).  Returns the process exit
// code.
int run_smtlib(std::istream& in, std::ostream& out);

}  // namespace arca::smt
