#include "arca/eval.hpp"

#include <sstream>
#include <vector>

namespace arca {

namespace {

struct Evaluator {
  const FiniteModel& m;
  const EvalOptions& opts;
  std::map<std::string, std::vector<Int>> env;  // bound-variable stacks

  Int term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Numeral:
        return t->num;
      case TermKind::Var: {
        auto it = env.find(t->name);
        if (it != env.end() && !it->second.empty()) return it->second.back();
        auto v = m.values.find(t->name);
        if (v == m.values.end()) throw EvalError("no value for variable '" + t->name + "'");
        return v->second;
      }
      case TermKind::Param: {
        if (t->name == "N") return m.n;
        auto v = m.values.find(t->name);
        if (v == m.values.end()) throw EvalError("no value for parameter '" + t->name + "'");
        return v->second;
      }
      case TermKind::Add: {
        Int s = 0;
        for (auto& a : t->args) s += term(a);
        return s;
      }
      case TermKind::Neg:
        return -term(t->args[0]);
      case TermKind::Mul:
        return t->num * term(t->args[0]);
      case TermKind::Read:
        return m.read(t->name, term(t->args[0]));
      case TermKind::Count: {
        Int cnt = 0;
        auto& stack = env[t->name];
        for (Int x = 0; x < m.n; ++x) {
          stack.push_back(x);
          bool hold = formula(t->body);
          env[t->name].pop_back();
          if (hold) ++cnt;
        }
        return cnt;
      }
    }
    throw EvalError("malformed term");
  }

  bool formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Lt:
        return term(f->lhs) < term(f->rhs);
      case FormulaKind::Eq:
        return term(f->lhs) == term(f->rhs);
      case FormulaKind::Cong:
        return divides(f->mod, term(f->lhs) - term(f->rhs));
      case FormulaKind::And:
        for (auto& a : f->args)
          if (!formula(a)) return false;
        return true;
      case FormulaKind::Not:
        return !formula(f->args[0]);
      case FormulaKind::Exists: {
        if (!opts.quant_bound)
          throw EvalError("evaluating a quantifier requires EvalOptions::quant_bound");
        Int b = *opts.quant_bound;
        if (b < 0) throw EvalError("quant_bound must be nonnegative");
        Int top = opts.quant_hi.value_or(b);
        Int hi = m.n - 1 > top ? m.n - 1 : top;
        for (Int x = -b; x <= hi; ++x) {
          env[f->var].push_back(x);
          bool hold = formula(f->args[0]);
          env[f->var].pop_back();
          if (hold) return true;
        }
        return false;
      }
    }
    throw EvalError("malformed formula");
  }
};

}  // namespace

Int eval_term(const TermPtr& t, const FiniteModel& m, const EvalOptions& opts) {
  Evaluator ev{m, opts};
  return ev.term(t);
}

bool eval_finite(const FormulaPtr& f, const FiniteModel& m, const EvalOptions& opts) {
  Evaluator ev{m, opts};
  return ev.formula(f);
}

std::string to_string(const FiniteModel& m) {
  std::ostringstream out;
  out << "N = " << m.n << "\n";
  for (auto& [name, v] : m.values) out << name << " = " << v << "\n";
  for (auto& [name, entries] : m.arrays) {
    out << name << " = [";
    for (Int i = 0; i < m.n; ++i) {
      if (i > 0) out << ", ";
      out << m.read(name, i);
    }
    out << "]\n";
    (void)entries;
  }
  return out.str();
}

}  // namespace arca
