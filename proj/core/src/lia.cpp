#include "arca/lia.hpp"

#include "arca/subst.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace arca::lia {

// --- LinExpr ----------------------------------------------------------------

LinExpr LinExpr::of_const(Int c) {
  LinExpr e;
  e.constant = std::move(c);
  return e;
}

LinExpr LinExpr::of_var(const std::string& v, Int coef) {
  LinExpr e;
  if (coef != 0) e.coeffs[v] = std::move(coef);
  return e;
}

LinExpr& LinExpr::operator+=(const LinExpr& o) {
  for (auto& [v, c] : o.coeffs) {
    Int& mine = coeffs[v];
    mine += c;
    if (mine == 0) coeffs.erase(v);
  }
  constant += o.constant;
  return *this;
}

LinExpr& LinExpr::operator-=(const LinExpr& o) { return *this += o.scaled(-1); }

LinExpr LinExpr::operator+(const LinExpr& o) const {
  LinExpr r = *this;
  r += o;
  return r;
}

LinExpr LinExpr::operator-(const LinExpr& o) const {
  LinExpr r = *this;
  r -= o;
  return r;
}

LinExpr LinExpr::scaled(const Int& k) const {
  LinExpr r;
  if (k == 0) return r;
  for (auto& [v, c] : coeffs) r.coeffs[v] = c * k;
  r.constant = constant * k;
  return r;
}

Int LinExpr::coeff(const std::string& v) const {
  auto it = coeffs.find(v);
  return it == coeffs.end() ? Int(0) : it->second;
}

void LinExpr::set_coeff(const std::string& v, Int c) {
  if (c == 0)
    coeffs.erase(v);
  else
    coeffs[v] = std::move(c);
}

LinExpr LinExpr::substituted(const std::string& v, const LinExpr& e) const {
  Int c = coeff(v);
  if (c == 0) return *this;
  LinExpr r = *this;
  r.coeffs.erase(v);
  r += e.scaled(c);
  return r;
}

Int LinExpr::eval(const std::map<std::string, Int>& env) const {
  Int s = constant;
  for (auto& [v, c] : coeffs) {
    auto it = env.find(v);
    if (it != env.end()) s += c * it->second;
  }
  return s;
}

std::string LinExpr::str() const {
  std::ostringstream os;
  bool first = true;
  for (auto& [v, c] : coeffs) {
    if (!first) os << " + ";
    first = false;
    if (c == 1)
      os << v;
    else
      os << c.str() << "*" << v;
  }
  if (constant != 0 || first) {
    if (!first) os << " + ";
    os << constant.str();
  }
  return os.str();
}

// --- Lit / NForm ------------------------------------------------------------

bool Lit::eval(const std::map<std::string, Int>& env) const {
  Int v = expr.eval(env);
  switch (kind) {
    case LitKind::Ge:
      return v >= 0;
    case LitKind::Eq:
      return v == 0;
    case LitKind::Cong:
      return divides(mod, v);
  }
  return false;
}

std::string Lit::str() const {
  switch (kind) {
    case LitKind::Ge:
      return expr.str() + " >= 0";
    case LitKind::Eq:
      return expr.str() + " = 0";
    case LitKind::Cong:
      return expr.str() + " = 0 mod " + mod.str();
  }
  return "";
}

namespace {

Lit lit_true() { return Lit::ge(LinExpr::of_const(0)); }
Lit lit_false() { return Lit::ge(LinExpr::of_const(-1)); }

// Constant literals fold away while building conjunctions/disjunctions.
enum class Tri { True, False, Open };

Tri lit_status(const Lit& l) {
  if (!l.expr.is_const()) return Tri::Open;
  return l.eval({}) ? Tri::True : Tri::False;
}

}  // namespace

NForm NForm::of(Lit l) {
  NForm f;
  f.kind = Kind::Lit;
  f.lit = std::move(l);
  return f;
}

NForm NForm::conj(std::vector<NForm> kids) {
  std::vector<NForm> keep;
  for (auto& k : kids) {
    if (k.kind == Kind::Lit) {
      Tri s = lit_status(k.lit);
      if (s == Tri::True) continue;
      if (s == Tri::False) return of(lit_false());
    }
    keep.push_back(std::move(k));
  }
  if (keep.empty()) return of(lit_true());
  if (keep.size() == 1) return std::move(keep[0]);
  NForm f;
  f.kind = Kind::And;
  f.kids = std::move(keep);
  return f;
}

NForm NForm::disj(std::vector<NForm> kids) {
  std::vector<NForm> keep;
  for (auto& k : kids) {
    if (k.kind == Kind::Lit) {
      Tri s = lit_status(k.lit);
      if (s == Tri::False) continue;
      if (s == Tri::True) return of(lit_true());
    }
    keep.push_back(std::move(k));
  }
  if (keep.empty()) return of(lit_false());
  if (keep.size() == 1) return std::move(keep[0]);
  NForm f;
  f.kind = Kind::Or;
  f.kids = std::move(keep);
  return f;
}

bool NForm::eval(const std::map<std::string, Int>& env) const {
  switch (kind) {
    case Kind::Lit:
      return lit.eval(env);
    case Kind::And:
      for (auto& k : kids)
        if (!k.eval(env)) return false;
      return true;
    case Kind::Or:
      for (auto& k : kids)
        if (k.eval(env)) return true;
      return false;
  }
  return false;
}

// --- conversion -------------------------------------------------------------

LinExpr linearize(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Numeral:
      return LinExpr::of_const(t->num);
    case TermKind::Var:
    case TermKind::Param:
      return LinExpr::of_var(t->name);
    case TermKind::Add: {
      LinExpr e;
      for (auto& a : t->args) e += linearize(a);
      return e;
    }
    case TermKind::Neg:
      return linearize(t->args[0]).scaled(-1);
    case TermKind::Mul:
      return linearize(t->args[0]).scaled(t->num);
    case TermKind::Read:
    case TermKind::Count:
      break;
  }
  throw std::invalid_argument("term is not linear arithmetic: " + to_string(t));
}

namespace {

NForm nnf(const FormulaPtr& f, bool pos) {
  switch (f->kind) {
    case FormulaKind::Lt: {
      LinExpr l = linearize(f->lhs), r = linearize(f->rhs);
      if (pos) return NForm::of(Lit::ge(r - l - LinExpr::of_const(1)));  // t < u ⟺ u-t-1 ≥ 0
      return NForm::of(Lit::ge(l - r));                                  // ¬(t<u) ⟺ t-u ≥ 0
    }
    case FormulaKind::Eq: {
      LinExpr e = linearize(f->lhs) - linearize(f->rhs);
      if (pos) return NForm::of(Lit::eq(std::move(e)));
      return NForm::disj({NForm::of(Lit::ge(e - LinExpr::of_const(1))),
                          NForm::of(Lit::ge(e.scaled(-1) - LinExpr::of_const(1)))});
    }
    case FormulaKind::Cong: {
      LinExpr e = linearize(f->lhs) - linearize(f->rhs);
      if (pos) return NForm::of(Lit::cong(std::move(e), f->mod));
      std::vector<NForm> alts;  // ¬(e≡0) ⟺ ⋁_{j=1}^{m-1} e+j ≡ 0
      for (Int j = 1; j < f->mod; ++j)
        alts.push_back(NForm::of(Lit::cong(e + LinExpr::of_const(j), f->mod)));
      return NForm::disj(std::move(alts));
    }
    case FormulaKind::And: {
      std::vector<NForm> kids;
      for (auto& a : f->args) kids.push_back(nnf(a, pos));
      return pos ? NForm::conj(std::move(kids)) : NForm::disj(std::move(kids));
    }
    case FormulaKind::Not:
      return nnf(f->args[0], !pos);
    case FormulaKind::Exists:
      throw std::invalid_argument("quantifier reached ground conversion; eliminate first");
  }
  throw std::invalid_argument("malformed formula");
}

}  // namespace

NForm to_nnf(const FormulaPtr& f) { return nnf(f, true); }

// --- Cooper quantifier elimination ------------------------------------------

namespace {

using LitFn = std::function<NForm(const Lit&)>;

NForm map_lits(const NForm& f, const LitFn& fn) {
  switch (f.kind) {
    case NForm::Kind::Lit:
      return fn(f.lit);
    case NForm::Kind::And:
    case NForm::Kind::Or: {
      std::vector<NForm> kids;
      for (auto& k : f.kids) kids.push_back(map_lits(k, fn));
      return f.kind == NForm::Kind::And ? NForm::conj(std::move(kids))
                                        : NForm::disj(std::move(kids));
    }
  }
  return f;
}

void visit_lits(const NForm& f, const std::function<void(const Lit&)>& fn) {
  if (f.kind == NForm::Kind::Lit) {
    fn(f.lit);
    return;
  }
  for (auto& k : f.kids) visit_lits(k, fn);
}

// φ[x := e], literal-wise.
NForm subst_var(const NForm& f, const std::string& x, const LinExpr& e) {
  return map_lits(f, [&](const Lit& l) {
    Lit nl = l;
    nl.expr = l.expr.substituted(x, e);
    return NForm::of(std::move(nl));
  });
}

// φ with x pushed to -∞ (lower-bound literals false, upper true) or +∞, with
// congruences sampled at x := j.
NForm subst_infinite(const NForm& f, const std::string& x, const Int& j, bool minus_inf) {
  return map_lits(f, [&](const Lit& l) {
    Int c = l.expr.coeff(x);
    if (c == 0) return NForm::of(l);
    if (l.kind == LitKind::Cong) {
      Lit nl = l;
      nl.expr = l.expr.substituted(x, LinExpr::of_const(j));
      return NForm::of(std::move(nl));
    }
    // Ge with coefficient ±1: +1 is a lower bound on x, -1 an upper bound.
    bool lower = c > 0;
    return NForm::of(lower == minus_inf ? lit_false() : lit_true());
  });
}

bool nform_mentions(const NForm& f, const std::string& x) {
  bool found = false;
  visit_lits(f, [&](const Lit& l) { found |= l.expr.coeff(x) != 0; });
  return found;
}

void flatten_and(const NForm& f, std::vector<NForm>& out) {
  if (f.kind == NForm::Kind::And) {
    for (auto& k : f.kids) flatten_and(k, out);
    return;
  }
  out.push_back(f);
}

}  // namespace

NForm eliminate_var(const std::string& x, const NForm& f) {
  // Keep the expansion below local to the part of the formula that actually
  // constrains x: ∃x distributes over ∨, conjuncts without x slide out of
  // its scope, and an ∨ entangled with x inside an ∧ is pulled apart first.
  if (f.kind == NForm::Kind::Or) {
    std::vector<NForm> kids;
    kids.reserve(f.kids.size());
    for (auto& k : f.kids) kids.push_back(eliminate_var(x, k));
    return NForm::disj(std::move(kids));
  }
  if (f.kind == NForm::Kind::And) {
    std::vector<NForm> flat;
    flatten_and(f, flat);
    std::vector<NForm> keep, used;
    for (auto& k : flat) (nform_mentions(k, x) ? used : keep).push_back(k);
    if (used.empty()) return f;
    if (!keep.empty()) {
      keep.push_back(eliminate_var(x, NForm::conj(std::move(used))));
      return NForm::conj(std::move(keep));
    }
    for (size_t i = 0; i < used.size(); ++i) {
      if (used[i].kind != NForm::Kind::Or) continue;
      std::vector<NForm> alts;
      alts.reserve(used[i].kids.size());
      for (auto& o : used[i].kids) {
        std::vector<NForm> branch = used;
        branch[i] = o;
        alts.push_back(eliminate_var(x, NForm::conj(std::move(branch))));
      }
      return NForm::disj(std::move(alts));
    }
    // Reaching here: a flat conjunction of literals, every one mentioning x.
  }

  // Least common multiple of |coefficient of x| across the literals.
  Int delta = 1;
  bool occurs = false;
  visit_lits(f, [&](const Lit& l) {
    Int c = l.expr.coeff(x);
    if (c != 0) {
      occurs = true;
      delta = lcm_int(delta, abs_int(c));
    }
  });
  if (!occurs) return f;

  // Scale every literal so x's coefficient is ±delta, then read it as ±1
  // against the substituted variable x' := delta·x (which must be ≡ 0 mod
  // delta).  Equalities over x split into two inequalities.
  NForm scaled = map_lits(f, [&](const Lit& l) {
    Int a = l.expr.coeff(x);
    if (a == 0) return NForm::of(l);
    Int lam = delta / abs_int(a);
    LinExpr e = l.expr.scaled(lam);
    e.set_coeff(x, a > 0 ? 1 : -1);
    switch (l.kind) {
      case LitKind::Ge:
        return NForm::of(Lit::ge(std::move(e)));
      case LitKind::Eq:
        return NForm::conj(
            {NForm::of(Lit::ge(e)), NForm::of(Lit::ge(e.scaled(-1)))});
      case LitKind::Cong:
        return NForm::of(Lit::cong(std::move(e), l.mod * lam));
    }
    return NForm::of(l);
  });
  if (delta > 1)
    scaled = NForm::conj({std::move(scaled), NForm::of(Lit::cong(LinExpr::of_var(x), delta))});

  // Bounds and the congruence period of x.
  std::vector<LinExpr> lowers, uppers;
  Int period = 1;
  visit_lits(scaled, [&](const Lit& l) {
    Int c = l.expr.coeff(x);
    if (c == 0) return;
    if (l.kind == LitKind::Cong) {
      period = lcm_int(period, l.mod);
      return;
    }
    // Bounds are kept strict (x > b, x < u) so the substitution points b+j
    // and u-j with j in 1..period sweep exactly the candidate window.
    LinExpr rest = l.expr;
    rest.set_coeff(x, 0);
    if (c > 0) {
      LinExpr b = rest.scaled(-1);  // x ≥ -rest ⟺ x > -rest - 1
      b.constant -= 1;
      lowers.push_back(std::move(b));
    } else {
      rest.constant += 1;  // x ≤ rest ⟺ x < rest + 1
      uppers.push_back(std::move(rest));
    }
  });

  // ∃x φ ⟺ ⋁_{j=1}^{p} φ_{-∞}[j] ∨ ⋁_{b∈lowers} ⋁_j φ[b+j]; dually with the
  // upper bounds.  Use whichever side has fewer bounds.
  bool from_below = lowers.size() <= uppers.size();
  const std::vector<LinExpr>& bounds = from_below ? lowers : uppers;
  std::vector<NForm> out;
  for (Int j = 1; j <= period; ++j)
    out.push_back(subst_infinite(scaled, x, from_below ? j : -j, from_below));
  for (const LinExpr& b : bounds)
    for (Int j = 1; j <= period; ++j) {
      LinExpr point = b;
      point.constant += from_below ? j : -j;
      out.push_back(subst_var(scaled, x, point));
    }
  return NForm::disj(std::move(out));
}

// --- ground conjunction solving (Omega-style) --------------------------------

namespace {

struct Bound {
  LinExpr bound;  // the side without the variable
  Int coef;       // positive
};

struct OmegaSolver {
  long long fresh_counter = 0;

  std::string fresh(const char* base) {
    return std::string("%") + base + std::to_string(++fresh_counter);
  }

  // Decides a conjunction; recursion depth is a pure safety net.
  std::optional<Model> run(std::vector<Lit> lits, int depth) {
    if (depth > 200) throw std::logic_error("lia: elimination recursion too deep");

    // Congruences become equalities with fresh quotient variables.
    for (auto& l : lits) {
      if (l.kind != LitKind::Cong) continue;
      LinExpr e = l.expr;
      e += LinExpr::of_var(fresh("q"), -l.mod);
      l = Lit::eq(std::move(e));
    }

    // Equality elimination; defs are replayed in reverse for the model.
    std::vector<std::pair<std::string, LinExpr>> defs;
    for (;;) {
      auto it = std::find_if(lits.begin(), lits.end(),
                             [](const Lit& l) { return l.kind == LitKind::Eq; });
      if (it == lits.end()) break;
      LinExpr e = it->expr;
      if (e.is_const()) {
        if (e.constant != 0) return std::nullopt;
        lits.erase(it);
        continue;
      }
      Int g = 0;
      for (auto& [v, c] : e.coeffs) g = gcd_int(g, abs_int(c));
      if (!divides(g, e.constant)) return std::nullopt;
      if (g > 1) {
        for (auto& [v, c] : e.coeffs) c /= g;
        e.constant /= g;
      }
      // Prefer a unit-coefficient variable; otherwise shrink coefficients
      // with the symmetric-modulus trick until one appears.
      const std::string* unit = nullptr;
      const std::string* smallest = nullptr;
      Int small_abs = 0;
      for (auto& [v, c] : e.coeffs) {
        Int a = abs_int(c);
        if (a == 1) {
          unit = &v;
          break;
        }
        if (!smallest || a < small_abs) {
          smallest = &v;
          small_abs = a;
        }
      }
      if (unit) {
        std::string v = *unit;
        Int a = e.coeff(v);
        LinExpr rest = e;
        rest.set_coeff(v, 0);
        LinExpr def = rest.scaled(-a);  // a·v + rest = 0, a = ±1 ⟹ v = -a·rest
        for (auto& l : lits) l.expr = l.expr.substituted(v, def);
        defs.emplace_back(std::move(v), std::move(def));
        continue;
      }
      std::string v = *smallest;
      Int a = e.coeff(v);
      Int m = small_abs + 1;
      // a ≡ -sign(a) (mod m), so the symmetric-residue copy of the equality
      // has a unit coefficient on v; a fresh quotient variable absorbs the
      // modulus.
      LinExpr folded;
      for (auto& [w, c] : e.coeffs) folded.set_coeff(w, smod(c, m));
      folded.constant = smod(e.constant, m);
      folded += LinExpr::of_var(fresh("s"), -m);
      Int ap = folded.coeff(v);  // -sign(a) = ±1
      LinExpr rest = folded;
      rest.set_coeff(v, 0);
      LinExpr def = rest.scaled(-ap);
      for (auto& l : lits) l.expr = l.expr.substituted(v, def);
      defs.emplace_back(std::move(v), std::move(def));
    }

    auto sub = inequalities(std::move(lits), depth);
    if (!sub) return std::nullopt;
    Model m = std::move(*sub);
    for (auto it = defs.rbegin(); it != defs.rend(); ++it) m[it->first] = it->second.eval(m);
    return m;
  }

  // Fourier-Motzkin over a pure Ge system.
  std::optional<Model> inequalities(std::vector<Lit> lits, int depth) {
    // Drop satisfied constants, fail on violated ones.
    std::vector<Lit> live;
    for (auto& l : lits) {
      if (l.expr.is_const()) {
        if (l.expr.constant < 0) return std::nullopt;
        continue;
      }
      live.push_back(std::move(l));
    }
    if (live.empty()) return Model{};

    std::set<std::string> vars;
    for (auto& l : live)
      for (auto& [v, c] : l.expr.coeffs) vars.insert(v);

    // Pick the variable to eliminate: one-sided first, then one whose
    // bound pairs are all exact, then the fewest pairs.
    auto split = [&](const std::string& v, std::vector<Bound>& lo, std::vector<Bound>& up,
                     std::vector<Lit>& rest) {
      for (auto& l : live) {
        Int c = l.expr.coeff(v);
        if (c == 0) {
          rest.push_back(l);
          continue;
        }
        LinExpr other = l.expr;
        other.set_coeff(v, 0);
        if (c > 0)
          lo.push_back({other.scaled(-1), c});  // c·v ≥ -other
        else
          up.push_back({std::move(other), -c});  // |c|·v ≤ other
      }
    };

    std::string choice;
    bool choice_exact = false;
    size_t choice_pairs = 0;
    for (const auto& v : vars) {
      std::vector<Bound> lo, up;
      std::vector<Lit> rest;
      split(v, lo, up, rest);
      if (lo.empty() || up.empty()) {
        // Unbounded on one side: the constraints on v vanish.
        auto sub = inequalities(std::move(rest), depth);
        if (!sub) return std::nullopt;
        extend(*sub, v, lo, up);
        return sub;
      }
      bool exact = true;
      for (auto& l : lo)
        for (auto& u : up) exact &= l.coef == 1 || u.coef == 1;
      size_t pairs = lo.size() * up.size();
      if (choice.empty() || (exact && !choice_exact) ||
          (exact == choice_exact && pairs < choice_pairs)) {
        choice = v;
        choice_exact = exact;
        choice_pairs = pairs;
      }
    }

    std::vector<Bound> lo, up;
    std::vector<Lit> rest;
    split(choice, lo, up, rest);

    auto shadow = [&](bool dark) {
      std::vector<Lit> sub = rest;
      for (auto& l : lo)
        for (auto& u : up) {
          // β·a - α·b ≥ 0, tightened by (α-1)(β-1) for the dark shadow.
          LinExpr combo = u.bound.scaled(l.coef) - l.bound.scaled(u.coef);
          if (dark) combo.constant -= (u.coef - 1) * (l.coef - 1);
          sub.push_back(Lit::ge(std::move(combo)));
        }
      return sub;
    };

    if (choice_exact) {
      auto sub = inequalities(shadow(false), depth);
      if (!sub) return std::nullopt;
      extend(*sub, choice, lo, up);
      return sub;
    }

    auto sub = inequalities(shadow(true), depth);
    if (sub) {
      extend(*sub, choice, lo, up);
      return sub;
    }
    // Dark shadow empty: any solution hugs a lower bound.  α̂ is the largest
    // upper-bound coefficient on the chosen variable.
    Int ahat = 0;
    for (auto& u : up) ahat = std::max(ahat, u.coef);
    for (auto& l : lo) {
      Int top = fdiv(ahat * l.coef - ahat - l.coef, ahat);
      for (Int i = 0; i <= top; ++i) {
        LinExpr eq = LinExpr::of_var(choice, l.coef) - l.bound;
        eq.constant -= i;  // β·v = b + i
        std::vector<Lit> sub_lits = live;
        sub_lits.push_back(Lit::eq(std::move(eq)));
        auto res = run(std::move(sub_lits), depth + 1);
        if (res) return res;
      }
    }
    return std::nullopt;
  }

  // Assigns the eliminated variable a value inside its bounds, as close to
  // zero as the bounds allow.
  static void extend(Model& m, const std::string& v, const std::vector<Bound>& lo,
                     const std::vector<Bound>& up) {
    bool has_lo = !lo.empty(), has_up = !up.empty();
    Int lo_val = 0, up_val = 0;
    bool first = true;
    for (auto& b : lo) {
      Int x = ceil_div(b.bound.eval(m), b.coef);
      lo_val = first ? x : std::max(lo_val, x);
      first = false;
    }
    first = true;
    for (auto& b : up) {
      Int x = fdiv(b.bound.eval(m), b.coef);
      up_val = first ? x : std::min(up_val, x);
      first = false;
    }
    Int val = 0;
    if (has_lo && val < lo_val) val = lo_val;
    if (has_up && val > up_val) val = up_val;
    if (has_lo && val < lo_val) throw std::logic_error("lia: empty bound interval for " + v);
    m[v] = val;
  }
};

}  // namespace

std::optional<Model> solve_lits(const std::vector<Lit>& lits) {
  OmegaSolver solver;
  auto m = solver.run(lits, 0);
  if (!m) return std::nullopt;
  for (const auto& l : lits)
    if (!l.eval(*m)) throw std::logic_error("lia: model fails literal " + l.str());
  // Internal quotient variables do not belong in the answer; variables the
  // system never constrained do (at their implicit value 0).
  for (auto it = m->begin(); it != m->end();)
    it = it->first.starts_with('%') ? m->erase(it) : std::next(it);
  for (const auto& l : lits)
    for (const auto& [v, c] : l.expr.coeffs)
      if (!m->count(v)) (*m)[v] = 0;
  return m;
}

// --- DFS over the Or structure ----------------------------------------------

namespace {

struct Searcher {
  std::vector<Lit> stack;
  std::optional<Model> cached;

  bool cached_satisfies_stack() const {
    if (!cached) return false;
    for (const auto& l : stack)
      if (!l.eval(*cached)) return false;
    return true;
  }

  std::optional<Model> check_stack() {
    if (cached_satisfies_stack()) return cached;
    auto m = solve_lits(stack);
    if (m) cached = m;
    return m;
  }

  bool consistent_with(const std::vector<Lit>& extra) {
    if (cached) {
      bool ok = true;
      for (const auto& l : stack)
        if (!l.eval(*cached)) { ok = false; break; }
      if (ok)
        for (const auto& l : extra)
          if (!l.eval(*cached)) { ok = false; break; }
      if (ok) return true;
    }
    auto lits = stack;
    lits.insert(lits.end(), extra.begin(), extra.end());
    auto m = solve_lits(lits);
    if (m) cached = m;
    return m.has_value();
  }

  // Literals that necessarily hold once `n` is chosen: the conjunction spine,
  // stopping at nested choice points.
  static void forced_lits(const NForm& n, std::vector<Lit>& out) {
    switch (n.kind) {
      case NForm::Kind::Lit:
        out.push_back(n.lit);
        break;
      case NForm::Kind::And:
        for (const auto& k : n.kids) forced_lits(k, out);
        break;
      case NForm::Kind::Or:
        break;
    }
  }

  std::optional<Model> search(std::vector<const NForm*> pending) {
    size_t saved = stack.size();
    std::vector<const NForm*> ors;
    while (!pending.empty()) {
      const NForm* n = pending.back();
      pending.pop_back();
      switch (n->kind) {
        case NForm::Kind::Lit:
          stack.push_back(n->lit);
          break;
        case NForm::Kind::And:
          for (auto& k : n->kids) pending.push_back(&k);
          break;
        case NForm::Kind::Or:
          ors.push_back(n);
          break;
      }
    }
    std::optional<Model> result;
    if (ors.empty()) {
      result = check_stack();
    } else if (check_stack()) {  // theory pruning before branching
      // Filter each choice point down to the alternatives whose forced
      // literals are still consistent with the stack, then branch on the
      // choice point with the fewest survivors.  An empty survivor list
      // refutes this node outright, and a singleton commits without
      // multiplying branches, so determined chains collapse linearly
      // instead of exhausting the full product of alternatives.
      std::vector<std::vector<const NForm*>> open(ors.size());
      size_t best = ors.size();
      bool dead = false;
      for (size_t i = 0; i < ors.size() && !dead; ++i) {
        for (const auto& kid : ors[i]->kids) {
          std::vector<Lit> forced;
          forced_lits(kid, forced);
          if (consistent_with(forced)) open[i].push_back(&kid);
        }
        if (open[i].empty()) dead = true;
        if (best == ors.size() || open[i].size() < open[best].size()) best = i;
      }
      if (!dead) {
        std::vector<const NForm*> rest;
        for (size_t i = 0; i < ors.size(); ++i)
          if (i != best) rest.push_back(ors[i]);
        for (const NForm* kid : open[best]) {
          auto sub = rest;
          sub.push_back(kid);
          result = search(std::move(sub));
          if (result) break;
        }
      }
    }
    stack.resize(saved);
    return result;
  }
};

// Unit equalities on the conjunction spine (c*x + d = 0) pin their variable
// outright.  Substituting those values before the search folds away every
// alternative the pins already decide, which is the common case when a caller
// conjoins a formula with concrete assignments.
bool collect_units(const NForm& f, std::map<std::string, Int>& out, bool& contradiction) {
  if (f.kind == NForm::Kind::And) {
    bool found = false;
    for (const auto& k : f.kids) {
      found = collect_units(k, out, contradiction) || found;
      if (contradiction) return found;
    }
    return found;
  }
  if (f.kind != NForm::Kind::Lit || f.lit.kind != LitKind::Eq ||
      f.lit.expr.coeffs.size() != 1)
    return false;
  const auto& [v, c] = *f.lit.expr.coeffs.begin();
  const Int& d = f.lit.expr.constant;
  if (!divides(c, d)) {
    contradiction = true;
    return false;
  }
  Int val = -d / c;
  auto it = out.find(v);
  if (it == out.end()) {
    out.emplace(v, val);
    return true;
  }
  if (it->second != val) contradiction = true;
  return false;
}

NForm subst_fold(const NForm& f, const std::map<std::string, Int>& b) {
  switch (f.kind) {
    case NForm::Kind::Lit: {
      Lit l = f.lit;
      for (const auto& [v, val] : b) {
        Int c = l.expr.coeff(v);
        if (c == 0) continue;
        l.expr.constant += c * val;
        l.expr.set_coeff(v, 0);
      }
      if (l.expr.is_const()) return NForm::of(l.eval({}) ? lit_true() : lit_false());
      return NForm::of(std::move(l));
    }
    case NForm::Kind::And: {
      std::vector<NForm> ks;
      ks.reserve(f.kids.size());
      for (const auto& k : f.kids) ks.push_back(subst_fold(k, b));
      return NForm::conj(std::move(ks));
    }
    case NForm::Kind::Or: {
      std::vector<NForm> ks;
      ks.reserve(f.kids.size());
      for (const auto& k : f.kids) ks.push_back(subst_fold(k, b));
      return NForm::disj(std::move(ks));
    }
  }
  return f;  // unreachable
}

}  // namespace

std::optional<Model> solve_nform(const NForm& f) {
  NForm g = f;
  std::map<std::string, Int> pinned;
  // Folding can expose new unit equalities (a collapsed Or leaves its sole
  // conjunction on the spine), so iterate to a fixpoint.
  for (;;) {
    auto units = pinned;
    bool contradiction = false;
    collect_units(g, units, contradiction);
    if (contradiction) return std::nullopt;
    if (units.size() == pinned.size()) break;
    pinned = std::move(units);
    g = subst_fold(g, pinned);
  }
  Searcher s;
  auto m = s.search({&g});
  if (!m) return std::nullopt;
  for (const auto& [v, val] : pinned) (*m)[v] = val;
  return m;
}

// --- formula-level drivers ----------------------------------------------------

namespace {

// Remembers which names are parameters so eliminated formulas rebuild them
// with the right node kind.
TermPtr rebuild_symbol(const std::string& name, const std::set<std::string>& params) {
  return params.count(name) ? mk_param(name) : mk_var(name);
}

TermPtr expr_to_term(const LinExpr& e, const std::set<std::string>& params) {
  std::vector<TermPtr> parts;
  for (auto& [v, c] : e.coeffs) parts.push_back(mk_mul(c, rebuild_symbol(v, params)));
  if (e.constant != 0 || parts.empty()) parts.push_back(mk_num(e.constant));
  return mk_add(std::move(parts));
}

FormulaPtr lit_to_formula(const Lit& l, const std::set<std::string>& params) {
  TermPtr t = expr_to_term(l.expr, params);
  switch (l.kind) {
    case LitKind::Ge:
      return mk_le(mk_num(0), t);
    case LitKind::Eq:
      return mk_eq(t, mk_num(0));
    case LitKind::Cong:
      return mk_cong(l.mod, t, mk_num(0));
  }
  return mk_false();
}

FormulaPtr nform_to_formula(const NForm& f, const std::set<std::string>& params) {
  switch (f.kind) {
    case NForm::Kind::Lit:
      return lit_to_formula(f.lit, params);
    case NForm::Kind::And: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f.kids) kids.push_back(nform_to_formula(k, params));
      return mk_and(std::move(kids));
    }
    case NForm::Kind::Or: {
      std::vector<FormulaPtr> kids;
      for (auto& k : f.kids) kids.push_back(nform_to_formula(k, params));
      return mk_or(std::move(kids));
    }
  }
  return mk_false();
}

FormulaPtr qe_rec(const FormulaPtr& f, const std::set<std::string>& params) {
  switch (f->kind) {
    case FormulaKind::Lt:
    case FormulaKind::Eq:
    case FormulaKind::Cong:
      return f;
    case FormulaKind::And:
    case FormulaKind::Not: {
      std::vector<FormulaPtr> args;
      bool changed = false;
      for (auto& a : f->args) {
        auto na = qe_rec(a, params);
        changed |= na.get() != a.get();
        args.push_back(std::move(na));
      }
      if (!changed) return f;
      auto n = std::make_shared<Formula>(*f);
      n->args = std::move(args);
      return n;
    }
    case FormulaKind::Exists: {
      auto body = qe_rec(f->args[0], params);
      auto elim = eliminate_var(f->var, to_nnf(body));
      return simplify_ground(nform_to_formula(elim, params));
    }
  }
  return f;
}

// Literal-level negation of a quantifier-free NForm (De Morgan all the way
// down).
NForm negate_nform(const NForm& f) {
  switch (f.kind) {
    case NForm::Kind::Lit: {
      const Lit& l = f.lit;
      switch (l.kind) {
        case LitKind::Ge: {  // ¬(e ≥ 0) ⟺ -e-1 ≥ 0
          LinExpr e = l.expr.scaled(-1);
          e.constant -= 1;
          return NForm::of(Lit::ge(std::move(e)));
        }
        case LitKind::Eq: {  // ¬(e = 0) ⟺ e-1 ≥ 0 ∨ -e-1 ≥ 0
          LinExpr up = l.expr;
          up.constant -= 1;
          LinExpr dn = l.expr.scaled(-1);
          dn.constant -= 1;
          return NForm::disj(
              {NForm::of(Lit::ge(std::move(up))), NForm::of(Lit::ge(std::move(dn)))});
        }
        case LitKind::Cong: {  // ¬(e ≡_m 0) ⟺ ⋁_{j=1}^{m-1} e+j ≡_m 0
          std::vector<NForm> alts;
          for (Int j = 1; j < l.mod; ++j)
            alts.push_back(NForm::of(Lit::cong(l.expr + LinExpr::of_const(j), l.mod)));
          return NForm::disj(std::move(alts));
        }
      }
      return NForm::of(lit_false());
    }
    case NForm::Kind::And: {
      std::vector<NForm> kids;
      kids.reserve(f.kids.size());
      for (auto& k : f.kids) kids.push_back(negate_nform(k));
      return NForm::disj(std::move(kids));
    }
    case NForm::Kind::Or: {
      std::vector<NForm> kids;
      kids.reserve(f.kids.size());
      for (auto& k : f.kids) kids.push_back(negate_nform(k));
      return NForm::conj(std::move(kids));
    }
  }
  return NForm::of(lit_false());
}

// NForm conversion for satisfiability checks: a positively-occurring ∃ is
// sound to replace by a fresh free variable standing for its witness, so the
// expensive elimination is reserved for quantifiers under negation (whose
// bodies are prepared by full elimination first).
NForm ground_nnf(const FormulaPtr& f, bool pos, FreshNames& fresh) {
  switch (f->kind) {
    case FormulaKind::Lt:
    case FormulaKind::Eq:
    case FormulaKind::Cong:
      return nnf(f, pos);
    case FormulaKind::And: {
      std::vector<NForm> kids;
      kids.reserve(f->args.size());
      for (auto& a : f->args) kids.push_back(ground_nnf(a, pos, fresh));
      return pos ? NForm::conj(std::move(kids)) : NForm::disj(std::move(kids));
    }
    case FormulaKind::Not:
      return ground_nnf(f->args[0], !pos, fresh);
    case FormulaKind::Exists: {
      if (pos) {
        std::string w = fresh.fresh(f->var);
        return ground_nnf(substitute(f->args[0], f->var, mk_var(w)), true, fresh);
      }
      auto body = qe_rec(f->args[0], free_symbols(f->args[0]).params);
      return negate_nform(eliminate_var(f->var, to_nnf(body)));
    }
  }
  throw std::invalid_argument("malformed formula");
}

}  // namespace

TermPtr to_term(const LinExpr& e, const std::set<std::string>& params) {
  return expr_to_term(e, params);
}

FormulaPtr eliminate_quantifiers(const FormulaPtr& f) {
  return qe_rec(f, free_symbols(f).params);
}

std::optional<Model> solve(const FormulaPtr& f) {
  FreshNames fresh;
  fresh.seed(f);
  auto m = solve_nform(ground_nnf(f, true, fresh));
  if (!m) return std::nullopt;
  // The reported model ranges over exactly the free symbols of the input;
  // witnesses invented for quantifiers stay internal.
  Model out;
  auto fs = free_symbols(f);
  for (const auto& v : fs.vars) out[v] = m->count(v) ? (*m)[v] : 0;
  for (const auto& p : fs.params) out[p] = m->count(p) ? (*m)[p] : 0;
  return out;
}

}  // namespace arca::lia
