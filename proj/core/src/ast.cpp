#include "arca/ast.hpp"

#include <sstream>
#include <stdexcept>

namespace arca {

// --- constructors ---------------------------------------------------------

TermPtr mk_num(Int v) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Numeral;
  t->num = std::move(v);
  return t;
}

TermPtr mk_var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Var;
  t->name = std::move(name);
  return t;
}

TermPtr mk_param(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Param;
  t->name = std::move(name);
  return t;
}

TermPtr mk_add(std::vector<TermPtr> args) {
  if (args.empty()) return mk_num(0);
  if (args.size() == 1) return args[0];
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Add;
  t->args = std::move(args);
  return t;
}

TermPtr mk_add(TermPtr a, TermPtr b) { return mk_add(std::vector<TermPtr>{std::move(a), std::move(b)}); }

TermPtr mk_neg(TermPtr a) {
  if (a->kind == TermKind::Numeral) return mk_num(-a->num);
  if (a->kind == TermKind::Neg) return a->args[0];
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Neg;
  t->args = {std::move(a)};
  return t;
}

TermPtr mk_sub(TermPtr a, TermPtr b) { return mk_add(std::move(a), mk_neg(std::move(b))); }

TermPtr mk_mul(Int k, TermPtr a) {
  if (k == 0) return mk_num(0);
  if (k == 1) return a;
  if (a->kind == TermKind::Numeral) return mk_num(k * a->num);
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Mul;
  t->num = std::move(k);
  t->args = {std::move(a)};
  return t;
}

TermPtr mk_read(std::string array, TermPtr index) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Read;
  t->name = std::move(array);
  t->args = {std::move(index)};
  return t;
}

TermPtr mk_count(std::string var, FormulaPtr body) {
  auto t = std::make_shared<Term>();
  t->kind = TermKind::Count;
  t->name = std::move(var);
  t->body = std::move(body);
  return t;
}

FormulaPtr mk_lt(TermPtr a, TermPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Lt;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaPtr mk_eq(TermPtr a, TermPtr b) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Eq;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaPtr mk_cong(Int mod, TermPtr a, TermPtr b) {
  if (mod < 1) throw std::invalid_argument("mod-eq modulus must be >= 1");
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Cong;
  f->mod = std::move(mod);
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

FormulaPtr mk_and(std::vector<FormulaPtr> args) {
  if (args.empty()) return mk_true();
  if (args.size() == 1) return args[0];
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::And;
  f->args = std::move(args);
  return f;
}

FormulaPtr mk_and(FormulaPtr a, FormulaPtr b) { return mk_and(std::vector<FormulaPtr>{std::move(a), std::move(b)}); }

FormulaPtr mk_not(FormulaPtr a) {
  if (a->kind == FormulaKind::Not) return a->args[0];
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Not;
  f->args = {std::move(a)};
  return f;
}

FormulaPtr mk_exists(std::string var, FormulaPtr body) {
  auto f = std::make_shared<Formula>();
  f->kind = FormulaKind::Exists;
  f->var = std::move(var);
  f->args = {std::move(body)};
  return f;
}

FormulaPtr mk_or(std::vector<FormulaPtr> args) {
  if (args.empty()) return mk_false();
  if (args.size() == 1) return args[0];
  std::vector<FormulaPtr> neg;
  neg.reserve(args.size());
  for (auto& a : args) neg.push_back(mk_not(std::move(a)));
  return mk_not(mk_and(std::move(neg)));
}

FormulaPtr mk_or(FormulaPtr a, FormulaPtr b) { return mk_or(std::vector<FormulaPtr>{std::move(a), std::move(b)}); }

FormulaPtr mk_implies(FormulaPtr a, FormulaPtr b) { return mk_not(mk_and(std::move(a), mk_not(std::move(b)))); }

FormulaPtr mk_iff(FormulaPtr a, FormulaPtr b) {
  return mk_and(mk_implies(a, b), mk_implies(std::move(b), std::move(a)));
}

FormulaPtr mk_forall(std::string var, FormulaPtr body) {
  return mk_not(mk_exists(std::move(var), mk_not(std::move(body))));
}

FormulaPtr mk_le(TermPtr a, TermPtr b) { return mk_not(mk_lt(std::move(b), std::move(a))); }

FormulaPtr mk_true() { return mk_eq(mk_num(0), mk_num(0)); }
FormulaPtr mk_false() { return mk_eq(mk_num(0), mk_num(1)); }

static bool is_const_eq(const FormulaPtr& f, const Int& r) {
  return f->kind == FormulaKind::Eq && f->lhs->kind == TermKind::Numeral && f->lhs->num == 0 &&
         f->rhs->kind == TermKind::Numeral && f->rhs->num == r;
}

bool is_true(const FormulaPtr& f) { return is_const_eq(f, 0); }
bool is_false(const FormulaPtr& f) { return is_const_eq(f, 1); }

// --- printing -------------------------------------------------------------

static void print_term(std::ostream& os, const TermPtr& t);
static void print_formula(std::ostream& os, const FormulaPtr& f);

static void print_term(std::ostream& os, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Numeral:
      os << t->num.str();
      break;
    case TermKind::Var:
    case TermKind::Param:
      os << t->name;
      break;
    case TermKind::Add:
      os << "(+";
      for (auto& a : t->args) {
        os << ' ';
        print_term(os, a);
      }
      os << ')';
      break;
    case TermKind::Neg:
      os << "(- ";
      print_term(os, t->args[0]);
      os << ')';
      break;
    case TermKind::Mul:
      os << "(* " << t->num.str() << ' ';
      print_term(os, t->args[0]);
      os << ')';
      break;
    case TermKind::Read:
      os << "(select " << t->name << ' ';
      print_term(os, t->args[0]);
      os << ')';
      break;
    case TermKind::Count:
      os << "(card " << t->name << ' ';
      print_formula(os, t->body);
      os << ')';
      break;
  }
}

static void print_formula(std::ostream& os, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Lt:
      os << "(< ";
      print_term(os, f->lhs);
      os << ' ';
      print_term(os, f->rhs);
      os << ')';
      break;
    case FormulaKind::Eq:
      os << "(= ";
      print_term(os, f->lhs);
      os << ' ';
      print_term(os, f->rhs);
      os << ')';
      break;
    case FormulaKind::Cong:
      os << "(mod-eq " << f->mod.str() << ' ';
      print_term(os, f->lhs);
      os << ' ';
      print_term(os, f->rhs);
      os << ')';
      break;
    case FormulaKind::And:
      os << "(and";
      for (auto& a : f->args) {
        os << ' ';
        print_formula(os, a);
      }
      os << ')';
      break;
    case FormulaKind::Not:
      os << "(not ";
      print_formula(os, f->args[0]);
      os << ')';
      break;
    case FormulaKind::Exists:
      os << "(exists (" << f->var << ") ";
      print_formula(os, f->args[0]);
      os << ')';
      break;
  }
}

std::string to_string(const TermPtr& t) {
  std::ostringstream os;
  print_term(os, t);
  return os.str();
}

std::string to_string(const FormulaPtr& f) {
  std::ostringstream os;
  print_formula(os, f);
  return os.str();
}

// --- structural order -----------------------------------------------------

static int cmp_int(const Int& a, const Int& b) { return a < b ? -1 : (a > b ? 1 : 0); }

int compare(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (int c = cmp_int(a->num, b->num)) return c;
  if (int c = a->name.compare(b->name)) return c < 0 ? -1 : 1;
  if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (int c = compare(a->args[i], b->args[i])) return c;
  bool ha = a->body != nullptr, hb = b->body != nullptr;
  if (ha != hb) return ha < hb ? -1 : 1;
  if (ha)
    if (int c = compare(a->body, b->body)) return c;
  return 0;
}

int compare(const FormulaPtr& a, const FormulaPtr& b) {
  if (a.get() == b.get()) return 0;
  if (a->kind != b->kind) return a->kind < b->kind ? -1 : 1;
  if (int c = cmp_int(a->mod, b->mod)) return c;
  if (int c = a->var.compare(b->var)) return c < 0 ? -1 : 1;
  bool ha = a->lhs != nullptr, hb = b->lhs != nullptr;
  if (ha != hb) return ha < hb ? -1 : 1;
  if (ha) {
    if (int c = compare(a->lhs, b->lhs)) return c;
    if (int c = compare(a->rhs, b->rhs)) return c;
  }
  if (a->args.size() != b->args.size()) return a->args.size() < b->args.size() ? -1 : 1;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (int c = compare(a->args[i], b->args[i])) return c;
  return 0;
}

bool equal(const TermPtr& a, const TermPtr& b) { return compare(a, b) == 0; }
bool equal(const FormulaPtr& a, const FormulaPtr& b) { return compare(a, b) == 0; }

// --- traversal ------------------------------------------------------------

namespace {

struct RewriteCtx {
  const TermFn& tf;
  const FormFn& ff;
  std::vector<std::string> bound;
};

TermPtr rw_term(const TermPtr& t, RewriteCtx& cx);
FormulaPtr rw_formula(const FormulaPtr& f, RewriteCtx& cx);

TermPtr rw_term(const TermPtr& t, RewriteCtx& cx) {
  TermPtr out = t;
  switch (t->kind) {
    case TermKind::Numeral:
    case TermKind::Var:
    case TermKind::Param:
      break;
    case TermKind::Add:
    case TermKind::Neg:
    case TermKind::Mul:
    case TermKind::Read: {
      std::vector<TermPtr> args;
      bool changed = false;
      args.reserve(t->args.size());
      for (auto& a : t->args) {
        auto na = rw_term(a, cx);
        changed |= na.get() != a.get();
        args.push_back(std::move(na));
      }
      if (changed) {
        auto n = std::make_shared<Term>(*t);
        n->args = std::move(args);
        out = n;
      }
      break;
    }
    case TermKind::Count: {
      cx.bound.push_back(t->name);
      auto nb = rw_formula(t->body, cx);
      cx.bound.pop_back();
      if (nb.get() != t->body.get()) {
        auto n = std::make_shared<Term>(*t);
        n->body = std::move(nb);
        out = n;
      }
      break;
    }
  }
  if (cx.tf) {
    auto r = cx.tf(out, cx.bound);
    if (r) out = r;
  }
  return out;
}

FormulaPtr rw_formula(const FormulaPtr& f, RewriteCtx& cx) {
  FormulaPtr out = f;
  switch (f->kind) {
    case FormulaKind::Lt:
    case FormulaKind::Eq:
    case FormulaKind::Cong: {
      auto nl = rw_term(f->lhs, cx);
      auto nr = rw_term(f->rhs, cx);
      if (nl.get() != f->lhs.get() || nr.get() != f->rhs.get()) {
        auto n = std::make_shared<Formula>(*f);
        n->lhs = std::move(nl);
        n->rhs = std::move(nr);
        out = n;
      }
      break;
    }
    case FormulaKind::And:
    case FormulaKind::Not: {
      std::vector<FormulaPtr> args;
      bool changed = false;
      args.reserve(f->args.size());
      for (auto& a : f->args) {
        auto na = rw_formula(a, cx);
        changed |= na.get() != a.get();
        args.push_back(std::move(na));
      }
      if (changed) {
        auto n = std::make_shared<Formula>(*f);
        n->args = std::move(args);
        out = n;
      }
      break;
    }
    case FormulaKind::Exists: {
      cx.bound.push_back(f->var);
      auto nb = rw_formula(f->args[0], cx);
      cx.bound.pop_back();
      if (nb.get() != f->args[0].get()) {
        auto n = std::make_shared<Formula>(*f);
        n->args = {std::move(nb)};
        out = n;
      }
      break;
    }
  }
  if (cx.ff) {
    auto r = cx.ff(out, cx.bound);
    if (r) out = r;
  }
  return out;
}

}  // namespace

TermPtr rewrite(const TermPtr& t, const TermFn& tf, const FormFn& ff) {
  RewriteCtx cx{tf, ff, {}};
  return rw_term(t, cx);
}

FormulaPtr rewrite(const FormulaPtr& f, const TermFn& tf, const FormFn& ff) {
  RewriteCtx cx{tf, ff, {}};
  return rw_formula(f, cx);
}

namespace {

struct VisitCtx {
  const TermVisitor& tv;
  const FormVisitor& fv;
  std::vector<std::string> bound;
};

void vis_term(const TermPtr& t, VisitCtx& cx);
void vis_formula(const FormulaPtr& f, VisitCtx& cx);

void vis_term(const TermPtr& t, VisitCtx& cx) {
  if (cx.tv) cx.tv(*t, cx.bound);
  if (t->kind == TermKind::Count) {
    cx.bound.push_back(t->name);
    vis_formula(t->body, cx);
    cx.bound.pop_back();
    return;
  }
  for (auto& a : t->args) vis_term(a, cx);
}

void vis_formula(const FormulaPtr& f, VisitCtx& cx) {
  if (cx.fv) cx.fv(*f, cx.bound);
  switch (f->kind) {
    case FormulaKind::Lt:
    case FormulaKind::Eq:
    case FormulaKind::Cong:
      vis_term(f->lhs, cx);
      vis_term(f->rhs, cx);
      break;
    case FormulaKind::And:
    case FormulaKind::Not:
      for (auto& a : f->args) vis_formula(a, cx);
      break;
    case FormulaKind::Exists:
      cx.bound.push_back(f->var);
      vis_formula(f->args[0], cx);
      cx.bound.pop_back();
      break;
  }
}

}  // namespace

void visit(const TermPtr& t, const TermVisitor& tv, const FormVisitor& fv) {
  VisitCtx cx{tv, fv, {}};
  vis_term(t, cx);
}

void visit(const FormulaPtr& f, const TermVisitor& tv, const FormVisitor& fv) {
  VisitCtx cx{tv, fv, {}};
  vis_formula(f, cx);
}

std::vector<FormulaPtr> conjuncts_of(const FormulaPtr& f) {
  std::vector<FormulaPtr> out;
  std::vector<FormulaPtr> stack{f};
  while (!stack.empty()) {
    auto g = stack.back();
    stack.pop_back();
    if (g->kind == FormulaKind::And) {
      for (auto it = g->args.rbegin(); it != g->args.rend(); ++it) stack.push_back(*it);
    } else {
      out.push_back(g);
    }
  }
  return out;
}

size_t node_count(const FormulaPtr& f) {
  size_t n = 0;
  visit(
      f, [&](const Term&, const std::vector<std::string>&) { ++n; },
      [&](const Formula&, const std::vector<std::string>&) { ++n; });
  return n;
}

}  // namespace arca
