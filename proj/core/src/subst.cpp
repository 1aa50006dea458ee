#include "arca/subst.hpp"

#include <algorithm>
#include <cstdlib>

namespace arca {

FreeSymbols free_symbols(const FormulaPtr& f) {
  FreeSymbols out;
  visit(
      f,
      [&](const Term& t, const std::vector<std::string>& bound) {
        switch (t.kind) {
          case TermKind::Var:
            if (std::find(bound.begin(), bound.end(), t.name) == bound.end()) out.vars.insert(t.name);
            break;
          case TermKind::Param:
            out.params.insert(t.name);
            break;
          case TermKind::Read:
            out.arrays.insert(t.name);
            break;
          default:
            break;
        }
      },
      nullptr);
  return out;
}

FreeSymbols free_symbols(const TermPtr& t) {
  FreeSymbols out;
  visit(
      t,
      [&](const Term& tm, const std::vector<std::string>& bound) {
        switch (tm.kind) {
          case TermKind::Var:
            if (std::find(bound.begin(), bound.end(), tm.name) == bound.end()) out.vars.insert(tm.name);
            break;
          case TermKind::Param:
            out.params.insert(tm.name);
            break;
          case TermKind::Read:
            out.arrays.insert(tm.name);
            break;
          default:
            break;
        }
      },
      nullptr);
  return out;
}

bool occurs_free(const FormulaPtr& f, const std::string& var) {
  return free_symbols(f).vars.count(var) > 0;
}

void FreshNames::seed_name(const std::string& name) {
  auto pos = name.rfind('!');
  if (pos == std::string::npos || pos + 1 >= name.size()) return;
  const char* s = name.c_str() + pos + 1;
  char* end = nullptr;
  long long k = std::strtoll(s, &end, 10);
  if (end && *end == '\0' && k >= next_) next_ = k + 1;
}

void FreshNames::seed(const FormulaPtr& f) {
  visit(
      f,
      [&](const Term& t, const std::vector<std::string>&) {
        if (t.kind == TermKind::Var || t.kind == TermKind::Param || t.kind == TermKind::Count)
          seed_name(t.name);
      },
      [&](const Formula& g, const std::vector<std::string>&) {
        if (g.kind == FormulaKind::Exists) seed_name(g.var);
      });
}

void FreshNames::seed(const TermPtr& t) {
  visit(
      t,
      [&](const Term& tm, const std::vector<std::string>&) {
        if (tm.kind == TermKind::Var || tm.kind == TermKind::Param || tm.kind == TermKind::Count)
          seed_name(tm.name);
      },
      nullptr);
}

std::string FreshNames::fresh(const std::string& base) {
  auto pos = base.find('!');
  std::string stem = pos == std::string::npos ? base : base.substr(0, pos);
  return stem + "!" + std::to_string(next_++);
}

namespace {

// Recursive substitution with capture avoidance.  `fresh` is shared across
// the whole call so renamed binders stay distinct.
struct Subst {
  const std::string& var;
  const TermPtr& replacement;
  const std::set<std::string>& repl_free;
  FreshNames& fresh;

  TermPtr term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Var:
        return t->name == var ? replacement : t;
      case TermKind::Numeral:
      case TermKind::Param:
        return t;
      case TermKind::Add:
      case TermKind::Neg:
      case TermKind::Mul:
      case TermKind::Read: {
        std::vector<TermPtr> args;
        bool changed = false;
        for (auto& a : t->args) {
          auto na = term(a);
          changed |= na.get() != a.get();
          args.push_back(std::move(na));
        }
        if (!changed) return t;
        auto n = std::make_shared<Term>(*t);
        n->args = std::move(args);
        return n;
      }
      case TermKind::Count: {
        if (t->name == var) return t;  // shadowed
        if (repl_free.count(t->name)) {
          // Rename the binder so the replacement's free vars are not captured.
          std::string nn = fresh.fresh(t->name);
          auto renamed = substitute(t->body, t->name, mk_var(nn));
          auto nb = formula(renamed);
          return mk_count(nn, nb);
        }
        auto nb = formula(t->body);
        if (nb.get() == t->body.get()) return t;
        return mk_count(t->name, nb);
      }
    }
    return t;
  }

  FormulaPtr formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Lt:
      case FormulaKind::Eq:
      case FormulaKind::Cong: {
        auto nl = term(f->lhs);
        auto nr = term(f->rhs);
        if (nl.get() == f->lhs.get() && nr.get() == f->rhs.get()) return f;
        auto n = std::make_shared<Formula>(*f);
        n->lhs = std::move(nl);
        n->rhs = std::move(nr);
        return n;
      }
      case FormulaKind::And:
      case FormulaKind::Not: {
        std::vector<FormulaPtr> args;
        bool changed = false;
        for (auto& a : f->args) {
          auto na = formula(a);
          changed |= na.get() != a.get();
          args.push_back(std::move(na));
        }
        if (!changed) return f;
        auto n = std::make_shared<Formula>(*f);
        n->args = std::move(args);
        return n;
      }
      case FormulaKind::Exists: {
        if (f->var == var) return f;  // shadowed
        if (repl_free.count(f->var)) {
          std::string nn = fresh.fresh(f->var);
          auto renamed = substitute(f->args[0], f->var, mk_var(nn));
          return mk_exists(nn, formula(renamed));
        }
        auto nb = formula(f->args[0]);
        if (nb.get() == f->args[0].get()) return f;
        return mk_exists(f->var, nb);
      }
    }
    return f;
  }
};

}  // namespace

FormulaPtr substitute(const FormulaPtr& f, const std::string& var, const TermPtr& t) {
  FreshNames fresh;
  fresh.seed(f);
  fresh.seed(t);
  auto fs = free_symbols(t);
  Subst s{var, t, fs.vars, fresh};
  return s.formula(f);
}

TermPtr substitute(const TermPtr& tm, const std::string& var, const TermPtr& t) {
  FreshNames fresh;
  fresh.seed(tm);
  fresh.seed(t);
  auto fs = free_symbols(t);
  Subst s{var, t, fs.vars, fresh};
  return s.term(tm);
}

FormulaPtr rename_symbols(const FormulaPtr& f, const std::map<std::string, std::string>& vars,
                          const std::map<std::string, std::string>& arrays) {
  return rewrite(
      f,
      [&](const TermPtr& t, const std::vector<std::string>& bound) -> TermPtr {
        if (t->kind == TermKind::Var) {
          if (std::find(bound.begin(), bound.end(), t->name) != bound.end()) return t;
          auto it = vars.find(t->name);
          if (it != vars.end()) return mk_var(it->second);
        } else if (t->kind == TermKind::Read) {
          auto it = arrays.find(t->name);
          if (it != arrays.end()) return mk_read(it->second, t->args[0]);
        }
        return t;
      },
      nullptr);
}

namespace {

// Binder renaming shared by refresh_binders (fresh names) and
// alpha_canonical (positional names).
struct BinderRename {
  FreshNames* fresh = nullptr;  // null: positional "#i" names
  long long next = 1;
  std::map<std::string, std::vector<std::string>> env;

  std::string push(const std::string& name) {
    std::string nn = fresh ? fresh->fresh(name) : "#" + std::to_string(next++);
    env[name].push_back(nn);
    return nn;
  }
  void pop(const std::string& name) { env[name].pop_back(); }

  TermPtr term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Var: {
        auto it = env.find(t->name);
        if (it != env.end() && !it->second.empty()) return mk_var(it->second.back());
        return t;
      }
      case TermKind::Numeral:
      case TermKind::Param:
        return t;
      case TermKind::Count: {
        std::string nn = push(t->name);
        auto nb = formula(t->body);
        pop(t->name);
        return mk_count(nn, nb);
      }
      default: {
        std::vector<TermPtr> args;
        for (auto& a : t->args) args.push_back(term(a));
        auto n = std::make_shared<Term>(*t);
        n->args = std::move(args);
        return n;
      }
    }
  }

  FormulaPtr formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Lt:
      case FormulaKind::Eq:
      case FormulaKind::Cong: {
        auto n = std::make_shared<Formula>(*f);
        n->lhs = term(f->lhs);
        n->rhs = term(f->rhs);
        return n;
      }
      case FormulaKind::And:
      case FormulaKind::Not: {
        std::vector<FormulaPtr> args;
        for (auto& a : f->args) args.push_back(formula(a));
        auto n = std::make_shared<Formula>(*f);
        n->args = std::move(args);
        return n;
      }
      case FormulaKind::Exists: {
        std::string nn = push(f->var);
        auto nb = formula(f->args[0]);
        pop(f->var);
        return mk_exists(nn, nb);
      }
    }
    return f;
  }
};

}  // namespace

FormulaPtr refresh_binders(const FormulaPtr& f, FreshNames& fresh) {
  BinderRename br;
  br.fresh = &fresh;
  return br.formula(f);
}

FormulaPtr alpha_canonical(const FormulaPtr& f) {
  BinderRename br;  // positional names
  return br.formula(f);
}

bool alpha_equal(const FormulaPtr& a, const FormulaPtr& b) {
  return equal(alpha_canonical(a), alpha_canonical(b));
}

FormulaPtr inline_count_definitions(const FormulaPtr& f) {
  return rewrite(f, nullptr, [&](const FormulaPtr& g, const std::vector<std::string>&) -> FormulaPtr {
    if (g->kind != FormulaKind::Exists) return g;
    const std::string& v = g->var;
    auto parts = conjuncts_of(g->args[0]);
    // Find a conjunct v = (card ...) or (card ...) = v whose body avoids v.
    for (size_t i = 0; i < parts.size(); ++i) {
      const auto& c = parts[i];
      if (c->kind != FormulaKind::Eq) continue;
      TermPtr def;
      if (c->lhs->kind == TermKind::Var && c->lhs->name == v && c->rhs->kind == TermKind::Count)
        def = c->rhs;
      else if (c->rhs->kind == TermKind::Var && c->rhs->name == v && c->lhs->kind == TermKind::Count)
        def = c->lhs;
      if (!def) continue;
      if (free_symbols(def).vars.count(v)) continue;  // self-referential; leave alone
      std::vector<FormulaPtr> rest;
      for (size_t j = 0; j < parts.size(); ++j)
        if (j != i) rest.push_back(parts[j]);
      auto inlined = substitute(mk_and(std::move(rest)), v, def);
      // Re-run on the result: nested definitions may now be exposed.
      return inline_count_definitions(inlined);
    }
    return g;
  });
}

std::optional<Int> eval_ground_term(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Numeral:
      return t->num;
    case TermKind::Add: {
      Int s = 0;
      for (auto& a : t->args) {
        auto v = eval_ground_term(a);
        if (!v) return std::nullopt;
        s += *v;
      }
      return s;
    }
    case TermKind::Neg: {
      auto v = eval_ground_term(t->args[0]);
      if (!v) return std::nullopt;
      return -*v;
    }
    case TermKind::Mul: {
      auto v = eval_ground_term(t->args[0]);
      if (!v) return std::nullopt;
      return t->num * *v;
    }
    default:
      return std::nullopt;
  }
}

FormulaPtr simplify_ground(const FormulaPtr& f) {
  return rewrite(f, nullptr, [&](const FormulaPtr& g, const std::vector<std::string>&) -> FormulaPtr {
    switch (g->kind) {
      case FormulaKind::Lt:
      case FormulaKind::Eq:
      case FormulaKind::Cong: {
        auto l = eval_ground_term(g->lhs);
        if (!l) return g;
        auto r = eval_ground_term(g->rhs);
        if (!r) return g;
        bool v = g->kind == FormulaKind::Lt   ? *l < *r
                 : g->kind == FormulaKind::Eq ? *l == *r
                                              : divides(g->mod, *l - *r);
        return v ? mk_true() : mk_false();
      }
      case FormulaKind::And: {
        std::vector<FormulaPtr> keep;
        for (auto& a : g->args) {
          if (is_true(a)) continue;
          if (is_false(a)) return mk_false();
          keep.push_back(a);
        }
        if (keep.size() == g->args.size()) return g;
        return mk_and(std::move(keep));
      }
      case FormulaKind::Not:
        if (is_true(g->args[0])) return mk_false();
        if (is_false(g->args[0])) return mk_true();
        return g;
      case FormulaKind::Exists:
        if (is_true(g->args[0])) return mk_true();
        if (is_false(g->args[0])) return mk_false();
        return g;
    }
    return g;
  });
}

}  // namespace arca
