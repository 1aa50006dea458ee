#include "arca/parser.hpp"

#include <cctype>
#include <map>

namespace arca {

bool SExpr::is_number() const {
  if (!atom || text.empty()) return false;
  size_t k = text[0] == '-' ? 1 : 0;
  if (k >= text.size()) return false;
  for (; k < text.size(); ++k)
    if (!std::isdigit(static_cast<unsigned char>(text[k]))) return false;
  return true;
}

bool SExpr::is_symbol() const { return atom && !is_number(); }

namespace {

struct Reader {
  const std::string& text;
  size_t pos = 0;
  int line = 1, col = 1;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }

  void advance() {
    if (text[pos] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
    ++pos;
  }

  void skip_space() {
    while (!eof()) {
      char c = peek();
      if (c == ';') {
        while (!eof() && peek() != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  SExpr read_one() {
    skip_space();
    if (eof()) throw ParseError("unexpected end of input", line, col);
    SExpr e;
    e.line = line;
    e.col = col;
    char c = peek();
    if (c == '(') {
      advance();
      for (;;) {
        skip_space();
        if (eof()) throw ParseError("unbalanced '('", e.line, e.col);
        if (peek() == ')') {
          advance();
          return e;
        }
        e.items.push_back(read_one());
      }
    }
    if (c == ')') throw ParseError("unexpected ')'", line, col);
    e.atom = true;
    while (!eof()) {
      c = peek();
      if (c == '(' || c == ')' || c == ';' || std::isspace(static_cast<unsigned char>(c))) break;
      e.text.push_back(c);
      advance();
    }
    return e;
  }
};

struct Parser {
  const SymbolTable& table;
  FreshNames& fresh;
  std::map<std::string, std::vector<std::string>> env;  // surface name -> binder stack

  [[noreturn]] static void fail(const std::string& msg, const SExpr& at) {
    throw ParseError(msg, at.line, at.col);
  }

  std::string push_binder(const SExpr& v) {
    if (!v.is_symbol()) fail("expected a variable name", v);
    std::string nn = fresh.fresh(v.text);
    env[v.text].push_back(nn);
    return nn;
  }
  void pop_binder(const std::string& surface) { env[surface].pop_back(); }

  void arity(const SExpr& e, size_t want, const char* shape) {
    if (e.items.size() - 1 != want) fail("'" + e.items[0].text + "' takes " + shape, e);
  }

  TermPtr term(const SExpr& e) {
    if (e.atom) {
      if (e.is_number()) return mk_num(Int(e.text));
      auto it = env.find(e.text);
      if (it != env.end() && !it->second.empty()) return mk_var(it->second.back());
      switch (table.kind(e.text)) {
        case SymKind::Param:
          return mk_param(e.text);
        case SymKind::Var:
          return mk_var(e.text);
        case SymKind::Array:
          fail("array '" + e.text + "' used as an integer term", e);
        case SymKind::None:
          break;
      }
      fail("unknown symbol '" + e.text + "'", e);
    }
    if (e.items.empty() || !e.items[0].is_symbol()) fail("expected a term", e);
    const std::string& op = e.items[0].text;
    size_t n = e.items.size() - 1;

    if (op == "+") {
      if (n < 2) fail("'+' takes at least two arguments", e);
      std::vector<TermPtr> args;
      for (size_t i = 1; i < e.items.size(); ++i) args.push_back(term(e.items[i]));
      return mk_add(std::move(args));
    }
    if (op == "-") {
      if (n == 1) return mk_neg(term(e.items[1]));
      if (n == 2) {
        auto a = term(e.items[1]);
        auto b = term(e.items[2]);
        return mk_sub(a, b);
      }
      fail("'-' takes one or two arguments", e);
    }
    if (op == "*") {
      arity(e, 2, "a literal coefficient and a term");
      if (!e.items[1].is_number()) fail("coefficient of '*' must be an integer literal", e.items[1]);
      return mk_mul(Int(e.items[1].text), term(e.items[2]));
    }
    if (op == "select") {
      arity(e, 2, "an array and an index");
      const SExpr& a = e.items[1];
      if (!a.is_symbol() || table.kind(a.text) != SymKind::Array)
        fail("'select' expects a declared array", a);
      return mk_read(a.text, term(e.items[2]));
    }
    if (op == "card") {
      arity(e, 2, "a bound variable and a formula");
      std::string nn = push_binder(e.items[1]);
      auto body = formula(e.items[2]);
      pop_binder(e.items[1].text);
      return mk_count(nn, body);
    }
    fail("unknown term operator '" + op + "'", e.items[0]);
  }

  FormulaPtr formula(const SExpr& e) {
    if (e.atom) {
      if (e.text == "true") return mk_true();
      if (e.text == "false") return mk_false();
      fail("expected a formula", e);
    }
    if (e.items.empty() || !e.items[0].is_symbol()) fail("expected a formula", e);
    const std::string& op = e.items[0].text;
    size_t n = e.items.size() - 1;

    if (op == "and" || op == "or") {
      if (n < 2) fail("'" + op + "' takes at least two arguments", e);
      std::vector<FormulaPtr> args;
      for (size_t i = 1; i < e.items.size(); ++i) args.push_back(formula(e.items[i]));
      return op == "and" ? mk_and(std::move(args)) : mk_or(std::move(args));
    }
    if (op == "not") {
      arity(e, 1, "one formula");
      return mk_not(formula(e.items[1]));
    }
    if (op == "=>") {
      arity(e, 2, "two formulas");
      auto a = formula(e.items[1]);
      auto b = formula(e.items[2]);
      return mk_implies(a, b);
    }
    if (op == "iff") {
      // Desugars to two implications.  The second copies get fresh binders so
      // the all-binders-distinct invariant survives the duplication; the
      // refresh order matches the preorder position of each copy.
      arity(e, 2, "two formulas");
      auto a = formula(e.items[1]);
      auto b = formula(e.items[2]);
      auto fwd = mk_implies(a, b);
      auto b2 = refresh_binders(b, fresh);
      auto a2 = refresh_binders(a, fresh);
      return mk_and(fwd, mk_implies(b2, a2));
    }
    if (op == "exists" || op == "forall") {
      arity(e, 2, "a variable list and a formula");
      const SExpr& vs = e.items[1];
      if (!vs.is_list() || vs.items.empty()) fail("expected a nonempty variable list", vs);
      std::vector<std::string> internal, surface;
      for (const auto& v : vs.items) {
        internal.push_back(push_binder(v));
        surface.push_back(v.text);
      }
      auto body = formula(e.items[2]);
      for (auto it = surface.rbegin(); it != surface.rend(); ++it) pop_binder(*it);
      for (auto it = internal.rbegin(); it != internal.rend(); ++it)
        body = op == "exists" ? mk_exists(*it, body) : mk_forall(*it, body);
      return body;
    }
    if (op == "<" || op == "=" || op == "distinct" || op == ">=") {
      arity(e, 2, "two terms");
      auto a = term(e.items[1]);
      auto b = term(e.items[2]);
      if (op == "<") return mk_lt(a, b);
      if (op == "=") return mk_eq(a, b);
      if (op == "distinct") return mk_not(mk_eq(a, b));
      return mk_le(b, a);
    }
    if (op == "<=" || op == ">") {
      // Desugared with the operands swapped, so parse the right one first to
      // keep binder numbering aligned with the printed form.
      arity(e, 2, "two terms");
      auto b = term(e.items[2]);
      auto a = term(e.items[1]);
      return op == "<=" ? mk_le(a, b) : mk_lt(b, a);
    }
    if (op == "mod-eq") {
      arity(e, 3, "a literal modulus and two terms");
      if (!e.items[1].is_number()) fail("modulus of 'mod-eq' must be an integer literal", e.items[1]);
      Int m(e.items[1].text);
      if (m < 1) fail("modulus must be >= 1", e.items[1]);
      auto a = term(e.items[2]);
      auto b = term(e.items[3]);
      return mk_cong(m, a, b);
    }
    fail("unknown connective '" + op + "'", e.items[0]);
  }
};

}  // namespace

std::vector<SExpr> read_sexprs(const std::string& text) {
  Reader r{text};
  std::vector<SExpr> out;
  for (;;) {
    r.skip_space();
    if (r.eof()) return out;
    out.push_back(r.read_one());
  }
}

FormulaPtr parse_formula(const SExpr& e, const SymbolTable& table, FreshNames& fresh) {
  Parser p{table, fresh};
  return p.formula(e);
}

TermPtr parse_term(const SExpr& e, const SymbolTable& table, FreshNames& fresh) {
  Parser p{table, fresh};
  return p.term(e);
}

ArcaFile parse_arca(const std::string& text) {
  ArcaFile out;
  FreshNames fresh;
  for (const auto& e : read_sexprs(text)) {
    if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol())
      throw ParseError("expected a (declare-...) or (assert ...) form", e.line, e.col);
    const std::string& head = e.items[0].text;
    auto symbol_arg = [&]() -> const std::string& {
      if (e.items.size() != 2 || !e.items[1].is_symbol())
        throw ParseError("'" + head + "' takes one symbol", e.line, e.col);
      return e.items[1].text;
    };
    try {
      if (head == "declare-param") {
        out.symbols.declare_param(symbol_arg());
      } else if (head == "declare-var") {
        out.symbols.declare_var(symbol_arg());
      } else if (head == "declare-array") {
        out.symbols.declare_array(symbol_arg());
      } else if (head == "assert") {
        if (e.items.size() != 2) throw ParseError("'assert' takes one formula", e.line, e.col);
        out.asserts.push_back(parse_formula(e.items[1], out.symbols, fresh));
      } else {
        throw ParseError("unknown toplevel form '" + head + "'", e.items[0].line, e.items[0].col);
      }
    } catch (const SymbolError& se) {
      throw ParseError(se.what(), e.line, e.col);
    }
  }
  out.formula = mk_and(out.asserts);
  return out;
}

}  // namespace arca
