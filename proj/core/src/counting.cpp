#include "arca/counting.hpp"

#include "arca/lia.hpp"
#include "arca/subst.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <tuple>
#include <utility>

namespace arca::counting {

namespace {

using lia::LinExpr;

FormulaPtr var_equals(const std::string& name, Int v) {
  return mk_eq(mk_var(name), mk_num(std::move(v)));
}

bool term_has_kind(const FormulaPtr& f, TermKind k) {
  bool found = false;
  visit(
      f, [&](const Term& t, const std::vector<std::string>&) { found |= t.kind == k; },
      [](const Formula&, const std::vector<std::string>&) {});
  return found;
}

bool contains_exists(const FormulaPtr& f) {
  bool found = false;
  visit(
      f, [](const Term&, const std::vector<std::string>&) {},
      [&](const Formula& g, const std::vector<std::string>&) {
        found |= g.kind == FormulaKind::Exists;
      });
  return found;
}

// Modular inverse of a modulo m, for gcd(a, m) = 1 and m >= 1.
Int mod_inverse(const Int& a, const Int& m) {
  Int r0 = a, r1 = m, s0 = 1, s1 = 0;
  while (r1 != 0) {
    Int q = r0 / r1;
    r0 -= q * r1;
    std::swap(r0, r1);
    s0 -= q * s1;
    std::swap(s0, s1);
  }
  return fmod(s0, m);
}

// --- negation removal --------------------------------------------------------
//
// A formula over <, =, ≡ is rewritten into a negation-free and/or tree whose
// leaves are positive atoms.  Each negated atom expands into an *exclusive*
// disjunction of positive atoms — exclusivity is what later keeps the region
// conjunctions pairwise disjoint, so counts can be summed.

struct PosForm {
  enum class Kind { True, False, Atom, And, Or };
  Kind kind = Kind::True;
  FormulaPtr atom;
  std::vector<PosForm> kids;
};

PosForm pos_const(bool b) {
  PosForm p;
  p.kind = b ? PosForm::Kind::True : PosForm::Kind::False;
  return p;
}

PosForm pos_atom(FormulaPtr a) {
  PosForm p;
  p.kind = PosForm::Kind::Atom;
  p.atom = std::move(a);
  return p;
}

PosForm pos_and(std::vector<PosForm> kids) {
  std::vector<PosForm> keep;
  for (auto& k : kids) {
    if (k.kind == PosForm::Kind::False) return pos_const(false);
    if (k.kind != PosForm::Kind::True) keep.push_back(std::move(k));
  }
  if (keep.empty()) return pos_const(true);
  if (keep.size() == 1) return std::move(keep[0]);
  PosForm p;
  p.kind = PosForm::Kind::And;
  p.kids = std::move(keep);
  return p;
}

PosForm pos_or(std::vector<PosForm> kids) {
  std::vector<PosForm> keep;
  for (auto& k : kids) {
    if (k.kind == PosForm::Kind::True) return pos_const(true);
    if (k.kind != PosForm::Kind::False) keep.push_back(std::move(k));
  }
  if (keep.empty()) return pos_const(false);
  if (keep.size() == 1) return std::move(keep[0]);
  PosForm p;
  p.kind = PosForm::Kind::Or;
  p.kids = std::move(keep);
  return p;
}

std::optional<bool> ground_truth(const Formula& f) {
  auto a = eval_ground_term(f.lhs), b = eval_ground_term(f.rhs);
  if (!a || !b) return std::nullopt;
  switch (f.kind) {
    case FormulaKind::Lt:
      return *a < *b;
    case FormulaKind::Eq:
      return *a == *b;
    case FormulaKind::Cong:
      return divides(f.mod, *a - *b);
    default:
      return std::nullopt;
  }
}

PosForm positivize(const FormulaPtr& f, bool pos) {
  switch (f->kind) {
    case FormulaKind::Lt:
    case FormulaKind::Eq:
    case FormulaKind::Cong: {
      if (auto g = ground_truth(*f)) return pos_const(*g == pos);
      if (pos) return pos_atom(f);
      if (f->kind == FormulaKind::Lt)
        return pos_or({pos_atom(mk_eq(f->rhs, f->lhs)), pos_atom(mk_lt(f->rhs, f->lhs))});
      if (f->kind == FormulaKind::Eq)
        return pos_or({pos_atom(mk_lt(f->lhs, f->rhs)), pos_atom(mk_lt(f->rhs, f->lhs))});
      std::vector<PosForm> alts;  // t ≢_n u  iff  t ≡_n u+l for some 0 < l < n
      for (Int l = 1; l < f->mod; ++l)
        alts.push_back(pos_atom(mk_cong(f->mod, f->lhs, mk_add(f->rhs, mk_num(l)))));
      return pos_or(std::move(alts));
    }
    case FormulaKind::And: {
      std::vector<PosForm> kids;
      for (auto& a : f->args) kids.push_back(positivize(a, pos));
      return pos ? pos_and(std::move(kids)) : pos_or(std::move(kids));
    }
    case FormulaKind::Not:
      return positivize(f->args[0], !pos);
    case FormulaKind::Exists:
      throw std::logic_error("positivize: quantifier survived elimination");
  }
  throw std::logic_error("positivize: malformed formula");
}

// The exclusive positive split of a negated atom; used again when a region
// assigns an atom false.
std::vector<FormulaPtr> negation_alternatives(const FormulaPtr& a) {
  switch (a->kind) {
    case FormulaKind::Lt:
      return {mk_eq(a->rhs, a->lhs), mk_lt(a->rhs, a->lhs)};
    case FormulaKind::Eq:
      return {mk_lt(a->lhs, a->rhs), mk_lt(a->rhs, a->lhs)};
    case FormulaKind::Cong: {
      std::vector<FormulaPtr> res;
      for (Int l = 1; l < a->mod; ++l)
        res.push_back(mk_cong(a->mod, a->lhs, mk_add(a->rhs, mk_num(l))));
      return res;
    }
    default:
      throw std::logic_error("negation_alternatives: not an atom");
  }
}

// --- region split ------------------------------------------------------------

using AtomIndex = std::map<FormulaPtr, size_t, FormulaLess>;

void collect_atoms(const PosForm& p, std::vector<FormulaPtr>& atoms, AtomIndex& index) {
  if (p.kind == PosForm::Kind::Atom && !index.count(p.atom)) {
    index.emplace(p.atom, atoms.size());
    atoms.push_back(p.atom);
  }
  for (auto& k : p.kids) collect_atoms(k, atoms, index);
}

bool eval_pos(const PosForm& p, const AtomIndex& index, const std::vector<int>& sign) {
  switch (p.kind) {
    case PosForm::Kind::True:
      return true;
    case PosForm::Kind::False:
      return false;
    case PosForm::Kind::Atom:
      return sign[index.at(p.atom)] == 1;
    case PosForm::Kind::And:
      for (auto& k : p.kids)
        if (!eval_pos(k, index, sign)) return false;
      return true;
    case PosForm::Kind::Or:
      for (auto& k : p.kids)
        if (eval_pos(k, index, sign)) return true;
      return false;
  }
  return false;
}

constexpr size_t kSplitCap = 4096;

// Enumerates the sign assignments over the atoms under which the body holds,
// pruning assignments that are arithmetically impossible (their count is
// zero, so they contribute nothing to the sum).
struct RegionSplit {
  std::vector<FormulaPtr> atoms;
  AtomIndex index;
  const PosForm* root = nullptr;
  std::vector<std::vector<int>> regions;
  std::vector<int> sign;

  bool consistent_prefix(size_t upto) const {
    std::vector<FormulaPtr> fs;
    for (size_t i = 0; i < upto; ++i) fs.push_back(sign[i] ? atoms[i] : mk_not(atoms[i]));
    return lia::solve(mk_and(std::move(fs))).has_value();
  }

  void dfs(size_t i) {
    if (i > 0 && !consistent_prefix(i)) return;
    if (i == atoms.size()) {
      if (eval_pos(*root, index, sign)) {
        if (regions.size() >= kSplitCap) throw std::runtime_error("count body splits into too many regions");
        regions.push_back(sign);
      }
      return;
    }
    sign[i] = 1;
    dfs(i + 1);
    sign[i] = 0;
    dfs(i + 1);
  }
};

// --- coefficient normalization -------------------------------------------------

// Atoms of one region conjunction, sorted by how they mention x.  The k >= 2
// queues still need quotient/remainder or residue guessing; the unit lists
// are final.
struct XState {
  std::string x;
  std::vector<std::pair<Int, LinExpr>> eqs;           // k·x = t
  std::vector<std::pair<Int, LinExpr>> lowsK;         // t < k·x, k >= 2
  std::vector<std::pair<Int, LinExpr>> upsK;          // k·x < t, k >= 2
  std::vector<std::tuple<Int, Int, LinExpr>> congsK;  // k·x ≡_n v, k >= 2
  std::vector<LinExpr> lows1;                         // a <= x
  std::vector<LinExpr> ups1;                          // x < u
  std::vector<std::pair<Int, LinExpr>> congs1;        // x ≡_n v
};

// Files a positive atom into the state; returns false when x is absent (the
// atom is left to the caller to hoist out of the count).
bool classify_atom(const FormulaPtr& a, XState& st) {
  LinExpr e = lia::linearize(a->lhs) - lia::linearize(a->rhs);
  Int k = e.coeff(st.x);
  if (k == 0) return false;
  LinExpr rest = e;
  rest.set_coeff(st.x, 0);
  switch (a->kind) {
    case FormulaKind::Lt: {  // k·x + rest < 0
      if (k > 0) {
        LinExpr u = rest.scaled(-1);  // k·x < -rest
        if (k == 1)
          st.ups1.push_back(std::move(u));
        else
          st.upsK.emplace_back(k, std::move(u));
      } else {  // rest < (-k)·x
        if (k == -1) {
          rest.constant += 1;  // rest < x  iff  rest+1 <= x
          st.lows1.push_back(std::move(rest));
        } else {
          st.lowsK.emplace_back(-k, std::move(rest));
        }
      }
      return true;
    }
    case FormulaKind::Eq:
      if (k > 0)
        st.eqs.emplace_back(k, rest.scaled(-1));
      else
        st.eqs.emplace_back(-k, std::move(rest));
      return true;
    case FormulaKind::Cong: {
      Int kk = k > 0 ? k : Int(-k);
      LinExpr v = k > 0 ? rest.scaled(-1) : std::move(rest);
      if (kk == 1)
        st.congs1.emplace_back(a->mod, std::move(v));
      else
        st.congsK.emplace_back(kk, a->mod, std::move(v));
      return true;
    }
    default:
      throw std::logic_error("classify_atom: not an atom");
  }
}

// --- the translation ---------------------------------------------------------

struct Translator {
  FreshNames& fresh;
  const std::set<std::string>& params;

  TermPtr term(const LinExpr& e) const { return lia::to_term(e, params); }

  // Every stored atom rebuilt as a formula over the variable xv (used when an
  // equality pins x and the count collapses to an existence check).
  FormulaPtr atoms_formula(const XState& st, const std::string& xv, size_t skip_eq) const {
    std::vector<FormulaPtr> fs;
    auto xvar = mk_var(xv);
    for (size_t i = 0; i < st.eqs.size(); ++i) {
      if (i == skip_eq) continue;
      fs.push_back(mk_eq(mk_mul(st.eqs[i].first, xvar), term(st.eqs[i].second)));
    }
    for (auto& [k, t] : st.lowsK) fs.push_back(mk_lt(term(t), mk_mul(k, xvar)));
    for (auto& [k, t] : st.upsK) fs.push_back(mk_lt(mk_mul(k, xvar), term(t)));
    for (auto& [k, n, v] : st.congsK) fs.push_back(mk_cong(n, mk_mul(k, xvar), term(v)));
    for (auto& a : st.lows1) fs.push_back(mk_le(term(a), xvar));
    for (auto& u : st.ups1) fs.push_back(mk_lt(xvar, term(u)));
    for (auto& [n, v] : st.congs1) fs.push_back(mk_cong(n, xvar, term(v)));
    return mk_and(std::move(fs));
  }

  FormulaPtr translate(const std::string& y, XState st) {
    // An equality pins x to at most one value: the count is 0 or 1.
    if (!st.eqs.empty()) {
      Int k = st.eqs[0].first;
      TermPtr t = term(st.eqs[0].second);
      std::string xe = fresh.fresh("x");
      auto ex = mk_exists(
          xe, mk_and(atoms_formula(st, xe, 0), mk_eq(mk_mul(k, mk_var(xe)), t)));
      return mk_or(mk_and(var_equals(y, 1), ex), mk_and(var_equals(y, 0), mk_not(ex)));
    }
    // t < k·x: guess the remainder of t by k; then q+1 <= x for the quotient
    // (t = kq + l with 0 <= l < k gives kq + l < kx iff q < x).
    if (!st.lowsK.empty()) {
      auto [k, t] = st.lowsK.front();
      XState rest = std::move(st);
      rest.lowsK.erase(rest.lowsK.begin());
      std::vector<FormulaPtr> branches;
      for (Int l = 0; l < k; ++l) {
        std::string q = fresh.fresh("q");
        XState sub = rest;
        LinExpr lo = LinExpr::of_var(q);
        lo.constant += 1;
        sub.lows1.push_back(std::move(lo));
        auto cond = mk_eq(term(t), mk_add(mk_mul(k, mk_var(q)), mk_num(l)));
        branches.push_back(mk_exists(q, mk_and(cond, translate(y, std::move(sub)))));
      }
      return mk_or(std::move(branches));
    }
    // k·x < t: guess the remainder of t-1 by k; then x < q+1 for the quotient.
    if (!st.upsK.empty()) {
      auto [k, t] = st.upsK.front();
      XState rest = std::move(st);
      rest.upsK.erase(rest.upsK.begin());
      LinExpr tm = t;
      tm.constant -= 1;
      std::vector<FormulaPtr> branches;
      for (Int l = 0; l < k; ++l) {
        std::string q = fresh.fresh("q");
        XState sub = rest;
        LinExpr up = LinExpr::of_var(q);
        up.constant += 1;
        sub.ups1.push_back(std::move(up));
        auto cond = mk_eq(term(tm), mk_add(mk_mul(k, mk_var(q)), mk_num(l)));
        branches.push_back(mk_exists(q, mk_and(cond, translate(y, std::move(sub)))));
      }
      return mk_or(std::move(branches));
    }
    // k·x ≡_n v: guess the residue of v, then reduce the coefficient away.
    if (!st.congsK.empty()) {
      auto [k, n, v] = st.congsK.front();
      XState rest = std::move(st);
      rest.congsK.erase(rest.congsK.begin());
      std::vector<FormulaPtr> branches;
      for (Int l = 0; l < n; ++l) {
        auto cond = mk_cong(n, term(v), mk_num(l));
        auto nc = normalize_congruence(k, n, l);
        FormulaPtr tail;
        if (nc.inconsistent) {
          tail = var_equals(y, 0);  // empty set: the congruence has no solution
        } else {
          XState sub = rest;
          if (nc.modulus != 1)
            sub.congs1.emplace_back(nc.modulus, LinExpr::of_const(nc.residue));
          tail = translate(y, std::move(sub));
        }
        branches.push_back(mk_and(cond, tail));
      }
      return mk_or(std::move(branches));
    }
    // Unit coefficients only.  Guess which lower bound is largest and which
    // upper bound is smallest; under the guess the others are redundant.
    if (st.lows1.size() > 1 || st.ups1.size() > 1) {
      std::vector<FormulaPtr> branches;
      for (size_t i = 0; i < st.lows1.size(); ++i)
        for (size_t j = 0; j < st.ups1.size(); ++j) {
          std::vector<FormulaPtr> parts;
          for (size_t i2 = 0; i2 < st.lows1.size(); ++i2)
            if (i2 != i) parts.push_back(mk_le(term(st.lows1[i2]), term(st.lows1[i])));
          for (size_t j2 = 0; j2 < st.ups1.size(); ++j2)
            if (j2 != j) parts.push_back(mk_le(term(st.ups1[j]), term(st.ups1[j2])));
          XState sub = st;
          sub.lows1 = {st.lows1[i]};
          sub.ups1 = {st.ups1[j]};
          parts.push_back(translate(y, std::move(sub)));
          branches.push_back(mk_and(std::move(parts)));
        }
      return mk_or(std::move(branches));
    }
    NormalizedConjunct nc;
    nc.lowers = {term(st.lows1[0])};
    nc.uppers = {term(st.ups1[0])};
    for (auto& [n, v] : st.congs1) nc.congruences.emplace_back(n, term(v));
    return closed_form(y, nc);
  }

  // Merges the congruences into one modulo the lcm of the moduli: the
  // solutions form a single residue class r mod lcm (guessed, its match
  // condition is x-free) or no class at all, in which case y = 0.
  FormulaPtr closed_form(const std::string& y, const NormalizedConjunct& c) {
    const TermPtr& a = c.lowers[0];
    const TermPtr& u = c.uppers[0];
    if (c.congruences.empty()) return count_special_case(a, u, 1, mk_num(0), y);
    if (c.congruences.size() == 1)
      return count_special_case(a, u, c.congruences[0].first, c.congruences[0].second, y);
    Int big = 1;
    for (auto& [n, v] : c.congruences) big = lcm_int(big, n);
    std::vector<FormulaPtr> matches;
    std::vector<FormulaPtr> alternatives;
    for (Int r = 0; r < big; ++r) {
      std::vector<FormulaPtr> conds;
      for (auto& [n, v] : c.congruences) conds.push_back(mk_cong(n, mk_num(r), v));
      auto cond = mk_and(std::move(conds));
      matches.push_back(cond);
      alternatives.push_back(mk_and(cond, count_special_case(a, u, big, mk_num(r), y)));
    }
    std::vector<FormulaPtr> none;
    none.reserve(matches.size() + 1);
    for (auto& m : matches) none.push_back(mk_not(m));
    none.push_back(var_equals(y, 0));
    alternatives.push_back(mk_and(std::move(none)));
    return mk_or(std::move(alternatives));
  }
};

FormulaPtr replace_term(const FormulaPtr& f, const TermPtr& from, const TermPtr& to) {
  return rewrite(
      f,
      [&](const TermPtr& t, const std::vector<std::string>&) {
        return equal(t, from) ? to : t;
      },
      [](const FormulaPtr& g, const std::vector<std::string>&) { return g; });
}

// Innermost-first driver: each atom containing a count term is rewritten to
// ∃z (def ∧ atom[z/count]) where def is the count's arithmetic equivalent.
struct CountEliminator {
  FreshNames fresh;

  static TermPtr find_count(const TermPtr& t) {
    if (t->kind == TermKind::Count) return t;
    for (auto& a : t->args)
      if (auto c = find_count(a)) return c;
    return nullptr;
  }

  FormulaPtr run(const FormulaPtr& f) {
    switch (f->kind) {
      case FormulaKind::And:
      case FormulaKind::Not:
      case FormulaKind::Exists: {
        std::vector<FormulaPtr> args;
        bool changed = false;
        for (auto& a : f->args) {
          auto n = run(a);
          changed |= n.get() != a.get();
          args.push_back(std::move(n));
        }
        if (!changed) return f;
        auto n = std::make_shared<Formula>(*f);
        n->args = std::move(args);
        return n;
      }
      case FormulaKind::Lt:
      case FormulaKind::Eq:
      case FormulaKind::Cong: {
        TermPtr c = find_count(f->lhs);
        if (!c) c = find_count(f->rhs);
        if (!c) return f;
        FormulaPtr body = run(c->body);  // inner counts first
        std::string z = fresh.fresh("z");
        FormulaPtr def = eliminate_count_atom({z, c->name, body});
        FormulaPtr atom = replace_term(f, c, mk_var(z));
        return run(mk_exists(z, mk_and(def, atom)));
      }
    }
    throw std::logic_error("eliminate_counting: malformed formula");
  }
};

}  // namespace

NormalizedCongruence normalize_congruence(const Int& l, const Int& n, const Int& k) {
  if (l < 1 || n < 1)
    throw std::invalid_argument("normalize_congruence: coefficient and modulus must be >= 1");
  Int g = gcd_int(l, n);
  if (!divides(g, k)) return {true, 1, 0};
  Int np = n / g;
  if (np == 1) return {false, 1, 0};
  Int inv = mod_inverse(l / g, np);
  return {false, np, fmod(inv * (k / g), np)};
}

FormulaPtr count_special_case(const TermPtr& t1, const TermPtr& t2, const Int& n,
                              const TermPtr& t3, const std::string& y) {
  if (n < 1) throw std::invalid_argument("count_special_case: modulus must be >= 1");
  // The first solution at or above t1 is t1 + r where r = (t3 - t1) mod n.
  // Guessing r keeps everything quantifier-free: with d = t2 - t1 - r, the
  // count is 0 when d <= 0 and ceil(d/n) otherwise, and the ceiling is the
  // unique y with n·y = d + l, n | d + l, 0 <= l < n.
  auto yv = mk_var(y);
  std::vector<FormulaPtr> branches;
  for (Int r = 0; r < n; ++r) {
    auto hit = mk_cong(n, t3, mk_add(t1, mk_num(r)));
    auto d = mk_add({t2, mk_neg(t1), mk_num(-r)});
    std::vector<FormulaPtr> steps;
    for (Int l = 0; l < n; ++l) {
      auto dl = mk_add(d, mk_num(l));
      steps.push_back(mk_and(mk_cong(n, dl, mk_num(0)), mk_eq(mk_mul(n, yv), dl)));
    }
    auto some = mk_and(mk_lt(mk_num(0), d), mk_or(std::move(steps)));
    auto none = mk_and(mk_le(d, mk_num(0)), mk_eq(yv, mk_num(0)));
    branches.push_back(mk_and(hit, mk_or(std::move(none), std::move(some))));
  }
  return mk_or(std::move(branches));
}

FormulaPtr eliminate_count_atom(const CountAtom& a) {
  if (a.result_var == a.bound_var)
    throw std::invalid_argument("count result and bound variable coincide");
  if (term_has_kind(a.body, TermKind::Read) || term_has_kind(a.body, TermKind::Count))
    throw std::invalid_argument("count body must be arithmetic");
  if (occurs_free(a.body, a.result_var))
    throw std::invalid_argument("count result variable occurs in the body");

  FormulaPtr body = contains_exists(a.body) ? lia::eliminate_quantifiers(a.body) : a.body;

  std::set<std::string> params = free_symbols(body).params;
  params.insert("N");

  FreshNames fresh;
  fresh.seed(body);
  fresh.seed_name(a.result_var);
  fresh.seed_name(a.bound_var);

  PosForm m = positivize(body, true);

  RegionSplit rs;
  collect_atoms(m, rs.atoms, rs.index);
  if (rs.atoms.size() > 24) throw std::runtime_error("count body has too many distinct atoms");
  rs.root = &m;
  rs.sign.assign(rs.atoms.size(), 0);
  rs.dfs(0);

  // Each region: positive atoms stay, refuted atoms expand into their
  // exclusive splits; every surviving combination is one disjoint piece of
  // the body, so the total count is the sum over the pieces.
  std::vector<std::vector<FormulaPtr>> branches;
  for (auto& sign : rs.regions) {
    std::vector<FormulaPtr> positives;
    std::vector<std::vector<FormulaPtr>> alts;
    bool dead = false;
    for (size_t i = 0; i < rs.atoms.size(); ++i) {
      if (sign[i]) {
        positives.push_back(rs.atoms[i]);
        continue;
      }
      auto alt = negation_alternatives(rs.atoms[i]);
      if (alt.empty()) {
        dead = true;  // refuting t ≡_1 u is impossible
        break;
      }
      alts.push_back(std::move(alt));
    }
    if (dead) continue;
    std::vector<size_t> pick(alts.size(), 0);
    for (;;) {
      std::vector<FormulaPtr> conj = positives;
      for (size_t i = 0; i < alts.size(); ++i) conj.push_back(alts[i][pick[i]]);
      if (lia::solve(mk_and(conj)).has_value()) {
        if (branches.size() >= kSplitCap)
          throw std::runtime_error("count body splits into too many pieces");
        branches.push_back(std::move(conj));
      }
      size_t i = 0;
      for (; i < pick.size(); ++i) {
        if (++pick[i] < alts[i].size()) break;
        pick[i] = 0;
      }
      if (i == pick.size()) break;
    }
  }

  Translator tr{fresh, params};
  auto build_branch = [&](const std::vector<FormulaPtr>& conj, const std::string& yname) {
    XState st;
    st.x = a.bound_var;
    std::vector<FormulaPtr> betas;
    for (auto& atom : conj)
      if (!classify_atom(atom, st)) betas.push_back(atom);
    // The counting window [0, N) is always part of the body.
    st.lows1.insert(st.lows1.begin(), LinExpr::of_const(0));
    st.ups1.insert(st.ups1.begin(), LinExpr::of_var("N"));
    auto core = tr.translate(yname, std::move(st));
    if (betas.empty()) return core;
    auto beta = mk_and(std::vector<FormulaPtr>(betas));
    return mk_or(mk_and(mk_not(beta), var_equals(yname, 0)), mk_and(beta, core));
  };

  FormulaPtr out;
  if (branches.empty()) {
    out = var_equals(a.result_var, 0);
  } else if (branches.size() == 1) {
    out = build_branch(branches[0], a.result_var);
  } else {
    std::vector<FormulaPtr> parts;
    std::vector<std::string> names;
    for (auto& b : branches) {
      std::string z = fresh.fresh("z");
      names.push_back(z);
      parts.push_back(build_branch(b, z));
    }
    std::vector<TermPtr> sum;
    sum.reserve(names.size());
    for (auto& z : names) sum.push_back(mk_var(z));
    parts.push_back(mk_eq(mk_var(a.result_var), mk_add(std::move(sum))));
    out = mk_and(std::move(parts));
    for (auto it = names.rbegin(); it != names.rend(); ++it) out = mk_exists(*it, out);
  }
  return simplify_ground(out);
}

FormulaPtr eliminate_counting(const FormulaPtr& f) {
  if (!free_symbols(f).arrays.empty())
    throw std::invalid_argument("eliminate_counting: array symbols are not allowed");
  CountEliminator ce;
  ce.fresh.seed(f);
  return simplify_ground(ce.run(f));
}

}  // namespace arca::counting
