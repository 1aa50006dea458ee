#include "arca/classify.hpp"

#include "arca/subst.hpp"

#include <map>
#include <set>
#include <vector>

namespace arca {

namespace {

bool has_read(const FormulaPtr& f) {
  bool found = false;
  visit(
      f, [&](const Term& t, const std::vector<std::string>&) { found |= t.kind == TermKind::Read; },
      nullptr);
  return found;
}

bool has_count(const FormulaPtr& f) {
  bool found = false;
  visit(
      f, [&](const Term& t, const std::vector<std::string>&) { found |= t.kind == TermKind::Count; },
      nullptr);
  return found;
}

enum class Binder { Exists, Count };

// Scope-aware shape check.  Reads must index at a variable that is either
// unbound in the walked region or bound by a cardinality binder; cardinality
// bodies must not mention variables bound by enclosing binders.
struct ShapeCheck {
  bool allow_counts = true;
  std::map<std::string, std::vector<Binder>> env;

  bool bound(const std::string& v) const {
    auto it = env.find(v);
    return it != env.end() && !it->second.empty();
  }
  Binder kind_of(const std::string& v) const { return env.at(v).back(); }

  bool term(const TermPtr& t) {
    switch (t->kind) {
      case TermKind::Numeral:
      case TermKind::Var:
      case TermKind::Param:
        return true;
      case TermKind::Read: {
        const TermPtr& ix = t->args[0];
        if (ix->kind != TermKind::Var) return false;
        if (bound(ix->name) && kind_of(ix->name) != Binder::Count) return false;
        return true;
      }
      case TermKind::Count: {
        if (!allow_counts) return false;
        auto fs = free_symbols(t->body);
        for (const auto& v : fs.vars)
          if (v != t->name && bound(v)) return false;
        env[t->name].push_back(Binder::Count);
        bool ok = formula(t->body);
        env[t->name].pop_back();
        return ok;
      }
      default:
        for (auto& a : t->args)
          if (!term(a)) return false;
        return true;
    }
  }

  bool formula(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::Lt:
      case FormulaKind::Eq:
      case FormulaKind::Cong:
        return term(f->lhs) && term(f->rhs);
      case FormulaKind::And:
      case FormulaKind::Not:
        for (auto& a : f->args)
          if (!formula(a)) return false;
        return true;
      case FormulaKind::Exists: {
        env[f->var].push_back(Binder::Exists);
        bool ok = formula(f->args[0]);
        env[f->var].pop_back();
        return ok;
      }
    }
    return false;
  }
};

bool is_flat_shape(const FormulaPtr& f) {
  ShapeCheck sc;
  return sc.formula(f);
}

// Basic: no cardinalities, and reads index only at locally unbound variables.
bool is_basic_shape(const FormulaPtr& f) {
  ShapeCheck sc;
  sc.allow_counts = false;
  return sc.formula(f);
}

}  // namespace

bool occurs_outside_reads(const TermPtr& t, const std::string& x) {
  switch (t->kind) {
    case TermKind::Var:
      return t->name == x;
    case TermKind::Numeral:
    case TermKind::Param:
      return false;
    case TermKind::Read:
      if (t->args[0]->kind == TermKind::Var) return false;  // index position
      return occurs_outside_reads(t->args[0], x);
    case TermKind::Count:
      if (t->name == x) return false;  // shadowed
      return occurs_outside_reads(t->body, x);
    default:
      for (auto& a : t->args)
        if (occurs_outside_reads(a, x)) return true;
      return false;
  }
}

bool occurs_outside_reads(const FormulaPtr& f, const std::string& x) {
  switch (f->kind) {
    case FormulaKind::Lt:
    case FormulaKind::Eq:
    case FormulaKind::Cong:
      return occurs_outside_reads(f->lhs, x) || occurs_outside_reads(f->rhs, x);
    case FormulaKind::And:
    case FormulaKind::Not:
      for (auto& a : f->args)
        if (occurs_outside_reads(a, x)) return true;
      return false;
    case FormulaKind::Exists:
      if (f->var == x) return false;  // shadowed
      return occurs_outside_reads(f->args[0], x);
  }
  return false;
}

namespace {

// Every cardinality binder occurs only inside read indices within its body.
bool binders_only_in_reads(const FormulaPtr& f) {
  bool ok = true;
  visit(
      f,
      [&](const Term& t, const std::vector<std::string>&) {
        if (t.kind == TermKind::Count && occurs_outside_reads(t.body, t.name)) ok = false;
      },
      nullptr);
  return ok;
}

// Recognizes ∃z̲ (matrix ∧ ⋀_l ♯{x|β_l} = z_l) where the bodies β_l are
// cardinality-free and may read at z̲ (possibly cyclically).  Returns 0 when
// the shape does not match, 1 for the general shape, 2 when every body uses
// its binder only under reads.
int eflat_shape(const FormulaPtr& f) {
  std::set<std::string> zs;
  FormulaPtr g = f;
  while (g->kind == FormulaKind::Exists) {
    zs.insert(g->var);
    g = g->args[0];
  }
  std::vector<std::pair<std::string, FormulaPtr>> bodies;  // binder, body
  std::vector<FormulaPtr> matrix;
  for (const auto& c : conjuncts_of(g)) {
    const TermPtr* card = nullptr;
    const TermPtr* result = nullptr;
    if (c->kind == FormulaKind::Eq) {
      if (c->lhs->kind == TermKind::Count && c->rhs->kind == TermKind::Var) {
        card = &c->lhs;
        result = &c->rhs;
      } else if (c->rhs->kind == TermKind::Count && c->lhs->kind == TermKind::Var) {
        card = &c->rhs;
        result = &c->lhs;
      }
    }
    if (card && zs.count((*result)->name)) {
      bodies.emplace_back((*card)->name, (*card)->body);
    } else {
      matrix.push_back(c);
    }
  }
  if (bodies.empty()) return 0;
  for (const auto& m : matrix) {
    if (has_count(m)) return 0;
    ShapeCheck sc;
    sc.allow_counts = false;
    if (!sc.formula(m)) return 0;
  }
  bool simple = true;
  for (const auto& [x, body] : bodies) {
    if (has_count(body)) return 0;
    ShapeCheck sc;
    sc.allow_counts = false;
    sc.env[x].push_back(Binder::Count);
    if (!sc.formula(body)) return 0;
    simple &= !occurs_outside_reads(body, x);
  }
  return simple ? 2 : 1;
}

}  // namespace

FormulaClass classify(const FormulaPtr& f) {
  auto g = inline_count_definitions(f);
  bool reads = has_read(g);
  bool counts = has_count(g);
  if (!reads && !counts) return FormulaClass::Arithmetic;
  if (!counts && is_basic_shape(g)) return FormulaClass::Basic;
  bool flat = is_flat_shape(g);
  if (flat && binders_only_in_reads(g)) return FormulaClass::SimpleFlat;
  if (!reads) return FormulaClass::Constraint;
  if (flat) return FormulaClass::Flat;
  switch (eflat_shape(f)) {  // on the original: inlining may bury the shape
    case 2:
      return FormulaClass::SimpleEFlat;
    case 1:
      return FormulaClass::EFlat;
    default:
      return FormulaClass::General;
  }
}

bool class_within(FormulaClass inner, FormulaClass outer) {
  if (inner == outer || outer == FormulaClass::General) return true;
  switch (inner) {
    case FormulaClass::Arithmetic:
      return outer != FormulaClass::General;  // inside every other class
    case FormulaClass::Basic:
      return outer == FormulaClass::SimpleFlat || outer == FormulaClass::Flat ||
             outer == FormulaClass::SimpleEFlat || outer == FormulaClass::EFlat;
    case FormulaClass::SimpleFlat:
      return outer == FormulaClass::Flat || outer == FormulaClass::SimpleEFlat ||
             outer == FormulaClass::EFlat;
    case FormulaClass::Flat:
    case FormulaClass::SimpleEFlat:
      return outer == FormulaClass::EFlat;
    default:
      return false;
  }
}

std::string to_string(FormulaClass c) {
  switch (c) {
    case FormulaClass::Arithmetic:
      return "Arithmetic";
    case FormulaClass::Basic:
      return "Basic";
    case FormulaClass::SimpleFlat:
      return "SimpleFlat";
    case FormulaClass::Constraint:
      return "Constraint";
    case FormulaClass::Flat:
      return "Flat";
    case FormulaClass::SimpleEFlat:
      return "SimpleEFlat";
    case FormulaClass::EFlat:
      return "EFlat";
    case FormulaClass::General:
      return "General";
  }
  return "General";
}

}  // namespace arca
