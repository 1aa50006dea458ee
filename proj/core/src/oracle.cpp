#include "arca/oracle.hpp"

#include "arca/subst.hpp"

#include <stdexcept>
#include <vector>

namespace arca::oracle {

namespace {

Int ipow(const Int& base, const Int& exp) {
  Int r = 1;
  for (Int i = 0; i < exp; ++i) r *= base;
  return r;
}

EvalOptions eval_options(const Bounds& b) {
  Int qb = b.quant_bound.value_or(b.value_bound);
  EvalOptions opts;
  opts.quant_bound = qb;
  opts.quant_hi = qb > b.n_max ? qb : b.n_max;
  return opts;
}

void validate(const Bounds& b) {
  if (b.n_max < 0) throw std::invalid_argument("n_max must be nonnegative");
  if (b.value_bound < 0) throw std::invalid_argument("value_bound must be nonnegative");
  if (b.quant_bound && *b.quant_bound < 0)
    throw std::invalid_argument("quant_bound must be nonnegative");
  if (b.candidate_cap < 1) throw std::invalid_argument("candidate_cap must be positive");
}

}  // namespace

std::optional<FiniteModel> find_model(const FormulaPtr& f, const Bounds& b) {
  validate(b);
  FreeSymbols fs = free_symbols(f);
  fs.params.erase("N");  // enumerated separately, over [0, n_max]

  // Slot order fixes the enumeration: params, then vars (each sorted by
  // name), then per-array entries; earlier slots are more significant.
  std::vector<std::string> scalars(fs.params.begin(), fs.params.end());
  scalars.insert(scalars.end(), fs.vars.begin(), fs.vars.end());

  const Int radix = 2 * b.value_bound + 1;
  Int candidates = 0;
  for (Int n = 0; n <= b.n_max; ++n)
    candidates += ipow(radix, Int(scalars.size()) + n * Int(fs.arrays.size()));
  if (candidates > b.candidate_cap)
    throw std::runtime_error("bounded model search would visit " + candidates.str() +
                             " candidates, above the cap of " + b.candidate_cap.str());

  const EvalOptions opts = eval_options(b);
  for (Int n = 0; n <= b.n_max; ++n) {
    FiniteModel m;
    m.n = n;
    // Cells point into the model; std::map nodes are stable, so only the
    // slots the odometer touches need rewriting between candidates.
    std::vector<Int*> cells;
    for (const auto& s : scalars) cells.push_back(&m.values[s]);
    for (const auto& a : fs.arrays)
      for (Int i = 0; i < n; ++i) cells.push_back(&m.arrays[a][i]);
    for (Int* c : cells) *c = -b.value_bound;

    for (;;) {
      if (eval_finite(f, m, opts)) return m;
      // Advance the odometer: last slot least significant.
      bool wrapped = cells.empty();
      for (size_t i = cells.size(); i > 0;) {
        --i;
        if (*cells[i] < b.value_bound) {
          ++*cells[i];
          break;
        }
        *cells[i] = -b.value_bound;
        if (i == 0) wrapped = true;  // carried past the first slot
      }
      if (wrapped) break;
    }
  }
  return std::nullopt;
}

CrosscheckReport crosscheck(const FormulaPtr& f, const Verdict& v, const Bounds& b) {
  CrosscheckReport r;
  switch (v.kind) {
    case Verdict::Kind::Unknown:
      r.note = "solver inconclusive; nothing to check";
      return r;

    case Verdict::Kind::Unsat: {
      auto m = find_model(f, b);
      if (m) {
        r.contradiction = true;
        r.oracle_model = std::move(m);
        r.note = "solver claims unsat but a bounded model exists: " + to_string(*r.oracle_model);
      } else {
        r.note = "unsat agrees with exhaustive search within bounds";
      }
      return r;
    }

    case Verdict::Kind::Sat: {
      if (v.certificate && v.certificate->model) {
        // A concrete witness trumps the bounded search: check it directly,
        // even when it lies beyond the search bounds.
        if (eval_finite(f, *v.certificate->model, eval_options(b))) {
          r.agreement = true;
          r.note = "certificate model satisfies the formula";
        } else {
          r.certificate_mismatch = true;
          r.note = "certificate model falsifies the formula: " + to_string(*v.certificate->model);
        }
        return r;
      }
      auto m = find_model(f, b);
      if (m) {
        r.agreement = true;
        r.oracle_model = std::move(m);
        r.note = "bounded search confirms sat: " + to_string(*r.oracle_model);
      } else {
        r.note = "sat not reproduced within bounds (consistent: model may be larger)";
      }
      return r;
    }
  }
  throw std::logic_error("malformed verdict");
}

}  // namespace arca::oracle
