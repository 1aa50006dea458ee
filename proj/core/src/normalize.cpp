#include "arca/normalize.hpp"

#include "arca/classify.hpp"
#include "arca/subst.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace arca::normalize {

namespace {

bool name_bound(const std::vector<std::string>& bound, const std::string& n) {
  return std::find(bound.begin(), bound.end(), n) != bound.end();
}

void refresh_symbols(EFlatForm& e) {
  auto fs = free_symbols(e.to_formula());
  e.vars = std::move(fs.vars);
  e.arrays = std::move(fs.arrays);
}

// Is the matrix already refuted by its ground conjuncts alone?
bool matrix_ground_false(const EFlatForm& e) {
  return equal(simplify_ground(e.matrix), mk_false());
}

// Deduplication key for a cardinality term: its body with the binder renamed
// to a name that cannot occur free anywhere in the enclosing formula.
std::string card_key(const std::string& binder, const FormulaPtr& body, const std::string& probe) {
  return to_string(substitute(body, binder, mk_var(probe)));
}

// (array, index-variable) pairs for reads whose index is a variable free at
// the read site.  Rejects non-variable read indices outright: the prenex
// counting form never contains any.
void collect_reads(const FormulaPtr& f, std::set<std::pair<std::string, std::string>>& out) {
  visit(
      f,
      [&](const Term& t, const std::vector<std::string>& bound) {
        if (t.kind != TermKind::Read) return;
        const auto& idx = t.args[0];
        if (idx->kind != TermKind::Var)
          throw std::invalid_argument("normalize: read index must be a variable");
        if (!name_bound(bound, idx->name)) out.emplace(t.name, idx->name);
      },
      nullptr);
}

// Index variables of reads at anything other than a card's own binder,
// sorted for deterministic guess order.
std::vector<std::string> read_index_vars(const EFlatForm& e) {
  std::set<std::pair<std::string, std::string>> reads;
  collect_reads(e.matrix, reads);
  std::set<std::string> idx;
  for (const auto& [a, v] : reads) idx.insert(v);
  for (const auto& c : e.cards) {
    std::set<std::pair<std::string, std::string>> body_reads;
    collect_reads(c.body, body_reads);
    for (const auto& [a, v] : body_reads)
      if (v != c.binder) idx.insert(v);
  }
  return {idx.begin(), idx.end()};
}

// Arrays read at `idxvar` anywhere `idxvar` is free, sorted.
std::vector<std::string> arrays_read_at(const EFlatForm& e, const std::string& idxvar) {
  std::set<std::string> arrays;
  auto scan = [&](const FormulaPtr& f, const std::string& skip_binder) {
    std::set<std::pair<std::string, std::string>> reads;
    collect_reads(f, reads);
    for (const auto& [a, v] : reads)
      if (v == idxvar && v != skip_binder) arrays.insert(a);
  };
  scan(e.matrix, "");
  for (const auto& c : e.cards) scan(c.body, c.binder);
  return {arrays.begin(), arrays.end()};
}

// Replaces every read of `array` at free variable `idxvar` by `value`.
FormulaPtr replace_read(const FormulaPtr& f, const std::string& array, const std::string& idxvar,
                        const TermPtr& value) {
  return rewrite(
      f,
      [&](const TermPtr& t, const std::vector<std::string>& bound) -> TermPtr {
        if (t->kind != TermKind::Read || t->name != array) return t;
        const auto& idx = t->args[0];
        if (idx->kind == TermKind::Var && idx->name == idxvar && !name_bound(bound, idxvar))
          return value;
        return t;
      },
      nullptr);
}

// Redirects every read (any array) at free variable `from` to index `to`.
FormulaPtr redirect_reads(const FormulaPtr& f, const std::string& from, const TermPtr& to) {
  return rewrite(
      f,
      [&](const TermPtr& t, const std::vector<std::string>& bound) -> TermPtr {
        if (t->kind != TermKind::Read) return t;
        const auto& idx = t->args[0];
        if (idx->kind == TermKind::Var && idx->name == from && !name_bound(bound, from))
          return mk_read(t->name, to);
        return t;
      },
      nullptr);
}

void apply_everywhere(EFlatForm& e, const std::function<FormulaPtr(const FormulaPtr&)>& fn) {
  e.matrix = fn(e.matrix);
  for (auto& c : e.cards) c.body = fn(c.body);
}

// Replaces a free variable throughout the form (matrix, bodies, and the
// symbol record); used when an equality guess merges two variables.
void substitute_var(EFlatForm& e, const std::string& from, const std::string& to) {
  auto t = mk_var(to);
  apply_everywhere(e, [&](const FormulaPtr& f) { return substitute(f, from, t); });
  e.vars.erase(from);
  e.vars.insert(to);
}

// Reads at result variables fold through a fresh alias: conjoin y = z and
// redirect every read at z to y.  Afterwards no read indexes a bound name.
void fold_result_reads(EFlatForm& e, FreshNames& fresh, std::vector<std::string>& trail) {
  std::set<std::string> results;
  for (const auto& c : e.cards) results.insert(c.result);
  for (const auto& z : read_index_vars(e)) {
    if (!results.count(z)) continue;
    std::string y = fresh.fresh("y");
    auto yv = mk_var(y);
    apply_everywhere(e, [&](const FormulaPtr& f) { return redirect_reads(f, z, yv); });
    e.matrix = mk_and(e.matrix, mk_eq(yv, mk_var(z)));
    e.vars.insert(y);
    trail.push_back("alias " + y + " = " + z + " for reads");
  }
}

// A binder name for newly built card bodies: "x" when nothing in sight uses
// it, otherwise a fresh name.
std::string pick_binder(const EFlatForm& e, FreshNames& fresh,
                        const std::set<std::string>& avoid) {
  if (avoid.count("x")) return fresh.fresh("x");
  if (e.vars.count("x")) return fresh.fresh("x");
  for (const auto& c : e.cards)
    if (c.result == "x" || occurs_free(c.body, "x")) return fresh.fresh("x");
  for (const auto& z : e.existentials)
    if (z == "x") return fresh.fresh("x");
  if (occurs_free(e.matrix, "x")) return fresh.fresh("x");
  return "x";
}

}  // namespace

FormulaPtr EFlatForm::to_formula() const {
  std::vector<FormulaPtr> parts;
  parts.push_back(matrix);
  for (const auto& c : cards)
    parts.push_back(mk_eq(mk_count(c.binder, c.body), mk_var(c.result)));
  FormulaPtr f = mk_and(std::move(parts));
  for (auto it = existentials.rbegin(); it != existentials.rend(); ++it)
    f = mk_exists(*it, f);
  return f;
}

DependencyGraph dependency_graph(const EFlatForm& e) {
  DependencyGraph g;
  for (const auto& c : e.cards) g.nodes.push_back(c.result);
  for (size_t j = 0; j < e.cards.size(); ++j) {
    auto fs = free_symbols(e.cards[j].body);
    for (size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i] != e.cards[j].binder && fs.vars.count(g.nodes[i]))
        g.arcs.emplace_back(j, i);
  }
  return g;
}

bool DependencyGraph::acyclic() const {
  std::vector<std::vector<size_t>> adj(nodes.size());
  for (const auto& [j, i] : arcs) adj[j].push_back(i);
  // 0 = unvisited, 1 = on stack, 2 = done
  std::vector<int> state(nodes.size(), 0);
  std::function<bool(size_t)> dfs = [&](size_t v) {
    state[v] = 1;
    for (size_t w : adj[v]) {
      if (state[w] == 1) return false;
      if (state[w] == 0 && !dfs(w)) return false;
    }
    state[v] = 2;
    return true;
  };
  for (size_t v = 0; v < nodes.size(); ++v)
    if (state[v] == 0 && !dfs(v)) return false;
  return true;
}

EFlatForm flatten(const FormulaPtr& f) {
  auto cls = classify(f);
  if (cls != FormulaClass::Arithmetic && cls != FormulaClass::Basic &&
      cls != FormulaClass::SimpleFlat && cls != FormulaClass::Flat)
    throw std::invalid_argument("flatten: input is not flat (" + to_string(cls) + ")");
  auto g = inline_count_definitions(f);

  FreshNames fresh;
  fresh.seed(g);
  std::string probe = fresh.fresh("cmp");

  // First-occurrence scan: each distinct body (up to binder renaming) gets
  // one result variable.
  struct Abstracted {
    std::string binder;
    FormulaPtr body;
    std::string result;
  };
  std::map<std::string, size_t> index;  // key -> position
  std::vector<Abstracted> found;
  bool captured = false;
  visit(
      g,
      [&](const Term& t, const std::vector<std::string>& bound) {
        if (t.kind != TermKind::Count) return;
        auto fs = free_symbols(t.body);
        for (const auto& v : fs.vars)
          if (v != t.name && name_bound(bound, v)) captured = true;
        auto key = card_key(t.name, t.body, probe);
        if (!index.count(key)) {
          index.emplace(key, found.size());
          found.push_back({t.name, t.body, fresh.fresh("z")});
        }
      },
      nullptr);
  if (captured)
    throw std::invalid_argument(
        "flatten: a cardinality body captures an enclosing bound variable");

  EFlatForm e;
  e.matrix = rewrite(
      g,
      [&](const TermPtr& t, const std::vector<std::string>&) -> TermPtr {
        if (t->kind != TermKind::Count) return t;
        return mk_var(found[index.at(card_key(t->name, t->body, probe))].result);
      },
      nullptr);
  for (auto& a : found) {
    e.cards.push_back({a.binder, a.body, a.result});
    e.existentials.push_back(a.result);
  }
  refresh_symbols(e);
  return e;
}

EFlatForm to_eflat(const FormulaPtr& f) {
  auto cls = classify(f);
  if (cls == FormulaClass::Arithmetic || cls == FormulaClass::Basic ||
      cls == FormulaClass::SimpleFlat || cls == FormulaClass::Flat)
    return flatten(f);

  // Explicit shape: ∃-prefix over matrix ∧ card equations (cycles allowed).
  std::vector<std::string> prefix;
  std::set<std::string> zs;
  FormulaPtr g = f;
  while (g->kind == FormulaKind::Exists) {
    prefix.push_back(g->var);
    zs.insert(g->var);
    g = g->args[0];
  }

  FreshNames fresh;
  fresh.seed(f);
  EFlatForm e;
  e.existentials = prefix;
  std::set<std::string> used_results;
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
      std::string z = (*result)->name;
      if (used_results.count(z)) {
        // Two equations share a result: keep a fresh result for the second
        // body and equate the two in the matrix.
        std::string z2 = fresh.fresh("z");
        e.cards.push_back({(*card)->name, (*card)->body, z2});
        e.existentials.push_back(z2);
        matrix.push_back(mk_eq(mk_var(z2), mk_var(z)));
      } else {
        used_results.insert(z);
        e.cards.push_back({(*card)->name, (*card)->body, z});
      }
    } else {
      matrix.push_back(c);
    }
  }
  e.matrix = mk_and(std::move(matrix));

  auto has_count = [](const FormulaPtr& h) {
    bool found = false;
    visit(
        h, [&](const Term& t, const std::vector<std::string>&) { found |= t.kind == TermKind::Count; },
        nullptr);
    return found;
  };
  if (e.cards.empty() || has_count(e.matrix))
    throw std::invalid_argument("to_eflat: input does not match the prenex counting shape");
  for (const auto& c : e.cards)
    if (has_count(c.body))
      throw std::invalid_argument("to_eflat: cardinality bodies must be cardinality-free");
  refresh_symbols(e);
  return e;
}

std::vector<GuessedForm> eliminate_parameter_reads(const EFlatForm& e0) {
  FreshNames fresh;
  fresh.seed(e0.to_formula());

  GuessedForm start{e0, {}};
  fold_result_reads(start.form, fresh, start.guesses);

  std::vector<GuessedForm> out;
  std::function<void(GuessedForm)> go = [&](GuessedForm g) {
    if (matrix_ground_false(g.form)) return;  // eager pruning
    auto idxs = read_index_vars(g.form);
    if (idxs.empty()) {
      refresh_symbols(g.form);
      out.push_back(std::move(g));
      return;
    }
    const std::string y = idxs.front();
    auto yv = mk_var(y);

    {  // y ≥ N: every read at y evaluates to 0
      GuessedForm b = g;
      for (const auto& a : arrays_read_at(g.form, y))
        apply_everywhere(b.form,
                         [&](const FormulaPtr& h) { return replace_read(h, a, y, mk_num(0)); });
      b.form.matrix = mk_and(b.form.matrix, mk_le(mk_param("N"), yv));
      b.guesses.push_back(y + " >= N");
      go(std::move(b));
    }
    {  // y < N: each array read at y becomes a value variable pinned by a
       // one-cell count
      GuessedForm b = g;
      b.form.matrix = mk_and(b.form.matrix, mk_lt(yv, mk_param("N")));
      b.guesses.push_back(y + " < N");
      for (const auto& a : arrays_read_at(g.form, y)) {
        std::string u = fresh.fresh("u!" + a);
        auto uv = mk_var(u);
        apply_everywhere(b.form,
                         [&](const FormulaPtr& h) { return replace_read(h, a, y, uv); });
        std::string binder = pick_binder(b.form, fresh, {y, u});
        auto bx = mk_var(binder);
        std::string zp = fresh.fresh("zp");
        b.form.cards.push_back(
            {binder, mk_and(mk_eq(bx, yv), mk_eq(mk_read(a, bx), uv)), zp});
        b.form.existentials.push_back(zp);
        b.form.matrix = mk_and(b.form.matrix, mk_eq(mk_var(zp), mk_num(1)));
        b.form.vars.insert(u);
        b.guesses.push_back("read " + a + "(" + y + ") = " + u);
      }
      go(std::move(b));
    }
  };
  go(std::move(start));
  return out;
}

EFlatForm make_partition(const EFlatForm& e) {
  if (!read_index_vars(e).empty())
    throw std::invalid_argument("make_partition: reads at non-binder variables remain");
  if (e.cards.empty()) return e;
  const size_t K = e.cards.size();
  if (K > 16)
    throw std::runtime_error("make_partition: too many cardinalities (2^" + std::to_string(K) +
                             " sign combinations)");

  FreshNames fresh;
  fresh.seed(e.to_formula());

  // Rename every body to one shared binder.
  bool shared = true;
  for (const auto& c : e.cards) shared &= c.binder == e.cards.front().binder;
  std::string binder = shared ? e.cards.front().binder : pick_binder(e, fresh, {});
  auto bx = mk_var(binder);
  std::vector<FormulaPtr> bodies;
  for (const auto& c : e.cards)
    bodies.push_back(c.binder == binder ? c.body : substitute(c.body, c.binder, bx));

  EFlatForm out;
  out.matrix = e.matrix;
  out.existentials = e.existentials;

  std::vector<std::vector<std::string>> result_sums(K);  // per l: u names with σ(l)=1
  for (size_t mask = 0; mask < (size_t{1} << K); ++mask) {
    std::string bits(K, '0');
    std::vector<FormulaPtr> parts;
    for (size_t l = 0; l < K; ++l) {
      bool on = (mask >> (K - 1 - l)) & 1;
      if (on) bits[l] = '1';
      parts.push_back(on ? bodies[l] : mk_not(bodies[l]));
    }
    std::string u = fresh.fresh("u!" + bits);
    for (size_t l = 0; l < K; ++l)
      if (bits[l] == '1') result_sums[l].push_back(u);
    out.cards.push_back({binder, mk_and(parts), u});
    out.existentials.push_back(u);
  }
  std::vector<FormulaPtr> sums;
  for (size_t l = 0; l < K; ++l) {
    std::vector<TermPtr> terms;
    for (const auto& u : result_sums[l]) terms.push_back(mk_var(u));
    sums.push_back(mk_eq(mk_var(e.cards[l].result), mk_add(std::move(terms))));
  }
  out.matrix = mk_and(out.matrix, mk_and(std::move(sums)));
  refresh_symbols(out);
  return out;
}

std::vector<GuessedForm> simple_preprocess(const EFlatForm& e0) {
  for (const auto& c : e0.cards)
    if (occurs_outside_reads(c.body, c.binder))
      throw std::invalid_argument(
          "simple_preprocess: a body uses its binder outside array reads");

  FreshNames fresh;
  fresh.seed(e0.to_formula());

  GuessedForm start{e0, {}};
  fold_result_reads(start.form, fresh, start.guesses);

  std::vector<GuessedForm> out;

  // Stage 3-5 packed into `finalize`: value-variable introduction, value
  // equality guesses, and the class-floor rewrite.
  std::function<void(GuessedForm)> finalize = [&](GuessedForm g) {
    if (matrix_ground_false(g.form)) return;
    auto reps = read_index_vars(g.form);  // surviving, pairwise-distinct
    if (reps.empty()) {
      refresh_symbols(g.form);
      out.push_back(std::move(g));
      return;
    }
    std::vector<std::string> arrays(g.form.arrays.begin(), g.form.arrays.end());

    // One value variable per (array, representative); replace the reads.
    std::vector<std::string> us;                         // declaration order
    std::map<std::string, std::map<std::string, std::string>> row;  // rep -> array -> u
    for (const auto& a : arrays)
      for (const auto& y : reps) {
        std::string u = fresh.fresh("u!" + a);
        us.push_back(u);
        row[y][a] = u;
        auto uv = mk_var(u);
        apply_everywhere(g.form,
                         [&](const FormulaPtr& h) { return replace_read(h, a, y, uv); });
        g.form.vars.insert(u);
        g.guesses.push_back("read " + a + "(" + y + ") = " + u);
      }

    // Guess equalities among the value variables: enumerate set partitions,
    // merging into the earlier variable or staying distinct from every class
    // representative so far.  `merged` resolves a value variable to the one
    // it was merged into.
    std::function<void(GuessedForm, std::vector<std::string>, std::map<std::string, std::string>,
                       size_t)>
        classes = [&](GuessedForm h, std::vector<std::string> ureps,
                      std::map<std::string, std::string> merged, size_t i) {
          if (matrix_ground_false(h.form)) return;
          if (i == us.size()) {
            // Group representatives by their value row.
            std::map<std::map<std::string, std::string>, std::vector<std::string>> groups;
            for (const auto& y : reps) {
              std::map<std::string, std::string> r;
              for (const auto& a : arrays) {
                auto u = row.at(y).at(a);
                while (merged.count(u)) u = merged.at(u);
                r[a] = u;
              }
              groups[r].push_back(y);
            }
            std::string binder = pick_binder(h.form, fresh, {});
            auto bx = mk_var(binder);
            for (const auto& [r, members] : groups) {
              std::vector<FormulaPtr> eqs;
              for (const auto& a : arrays)
                eqs.push_back(mk_eq(mk_read(a, bx), mk_var(r.at(a))));
              std::string zp = fresh.fresh("zp");
              h.form.cards.push_back({binder, mk_and(eqs), zp});
              h.form.existentials.push_back(zp);
              h.form.matrix =
                  mk_and(h.form.matrix, mk_le(mk_num(Int(members.size())), mk_var(zp)));
              std::string who;
              for (const auto& m : members) who += (who.empty() ? "" : ", ") + m;
              h.guesses.push_back("cell class {" + who + "}: count >= " +
                                  std::to_string(members.size()));
            }
            refresh_symbols(h.form);
            if (!matrix_ground_false(h.form)) out.push_back(std::move(h));
            return;
          }
          const std::string& u = us[i];
          for (const auto& r : ureps) {  // merge into an earlier class
            GuessedForm b = h;
            substitute_var(b.form, u, r);
            b.guesses.push_back(u + " = " + r);
            auto m = merged;
            m.emplace(u, r);
            classes(std::move(b), ureps, std::move(m), i + 1);
          }
          GuessedForm b = h;  // new class, distinct from the previous ones
          std::vector<FormulaPtr> diffs;
          for (const auto& r : ureps) diffs.push_back(mk_not(mk_eq(mk_var(u), mk_var(r))));
          if (!diffs.empty()) b.form.matrix = mk_and(b.form.matrix, mk_and(diffs));
          b.guesses.push_back(u + " distinct");
          auto next = ureps;
          next.push_back(u);
          classes(std::move(b), std::move(next), merged, i + 1);
        };
    classes(std::move(g), {}, {}, 0);
  };

  // Stage 2: equality classes among the surviving index variables.
  std::function<void(GuessedForm, std::vector<std::string>, std::vector<std::string>, size_t)>
      partition = [&](GuessedForm g, std::vector<std::string> ys, std::vector<std::string> yreps,
                      size_t i) {
        if (matrix_ground_false(g.form)) return;
        if (i == ys.size()) {
          finalize(std::move(g));
          return;
        }
        const std::string& y = ys[i];
        for (const auto& r : yreps) {
          GuessedForm b = g;
          substitute_var(b.form, y, r);
          b.guesses.push_back(y + " = " + r);
          partition(std::move(b), ys, yreps, i + 1);
        }
        GuessedForm b = g;
        std::vector<FormulaPtr> diffs;
        for (const auto& r : yreps) diffs.push_back(mk_not(mk_eq(mk_var(y), mk_var(r))));
        if (!diffs.empty()) b.form.matrix = mk_and(b.form.matrix, mk_and(diffs));
        b.guesses.push_back(y + " distinct");
        auto next = yreps;
        next.push_back(y);
        partition(std::move(b), std::move(ys), std::move(next), i + 1);
      };

  // Stage 1: guess each read-index variable against N.
  std::function<void(GuessedForm, std::set<std::string>)> stage1 =
      [&](GuessedForm g, std::set<std::string> decided) {
        if (matrix_ground_false(g.form)) return;
        std::string next;
        for (const auto& y : read_index_vars(g.form))
          if (!decided.count(y)) {
            next = y;
            break;
          }
        if (next.empty()) {
          auto survivors = read_index_vars(g.form);
          partition(std::move(g), std::move(survivors), {}, 0);
          return;
        }
        auto yv = mk_var(next);
        {  // next ≥ N: reads collapse to 0
          GuessedForm b = g;
          for (const auto& a : arrays_read_at(g.form, next))
            apply_everywhere(b.form,
                             [&](const FormulaPtr& h) { return replace_read(h, a, next, mk_num(0)); });
          b.form.matrix = mk_and(b.form.matrix, mk_le(mk_param("N"), yv));
          b.guesses.push_back(next + " >= N");
          auto d = decided;
          d.insert(next);
          stage1(std::move(b), std::move(d));
        }
        {  // next < N: reads survive into the class construction
          GuessedForm b = g;
          b.form.matrix = mk_and(b.form.matrix, mk_lt(yv, mk_param("N")));
          b.guesses.push_back(next + " < N");
          auto d = decided;
          d.insert(next);
          stage1(std::move(b), std::move(d));
        }
      };

  stage1(std::move(start), {});
  return out;
}

bool is_reduced(const EFlatForm& e) {
  auto has_read = [](const FormulaPtr& f) {
    bool found = false;
    visit(
        f, [&](const Term& t, const std::vector<std::string>&) { found |= t.kind == TermKind::Read; },
        nullptr);
    return found;
  };
  if (has_read(e.matrix)) return false;
  for (const auto& c : e.cards) {
    if (occurs_outside_reads(c.body, c.binder)) return false;
    bool foreign = false;
    std::set<std::pair<std::string, std::string>> reads;
    collect_reads(c.body, reads);
    for (const auto& [a, v] : reads) foreign |= v != c.binder;
    if (foreign) return false;
  }
  return true;
}

FormulaPtr existential_closure(const EFlatForm& e) {
  FormulaPtr f = e.to_formula();
  for (auto it = e.vars.rbegin(); it != e.vars.rend(); ++it) f = mk_exists(*it, f);
  return f;
}

}  // namespace arca::normalize
