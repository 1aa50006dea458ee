#include "arca/smt.hpp"

#include "arca/lia.hpp"
#include "arca/parser.hpp"
#include "arca/subst.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace arca::smt {

namespace {

using Clock = std::chrono::steady_clock;

bool has_quantifier(const FormulaPtr& f) {
  bool found = false;
  visit(
      f, [](const Term&, const std::vector<std::string>&) {},
      [&](const Formula& g, const std::vector<std::string>&) {
        if (g.kind == FormulaKind::Exists) found = true;
      });
  return found;
}

// --- SMT-LIB2 rendering -------------------------------------------------------

void render_int(std::ostream& os, const Int& v) {
  if (v < 0)
    os << "(- " << Int(-v).str() << ")";
  else
    os << v.str();
}

void render_term(std::ostream& os, const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Numeral:
      render_int(os, t->num);
      return;
    case TermKind::Var:
    case TermKind::Param:
      os << t->name;
      return;
    case TermKind::Add:
      os << "(+";
      for (auto& a : t->args) {
        os << ' ';
        render_term(os, a);
      }
      os << ')';
      return;
    case TermKind::Neg:
      os << "(- ";
      render_term(os, t->args[0]);
      os << ')';
      return;
    case TermKind::Mul:
      os << "(* ";
      render_int(os, t->num);
      os << ' ';
      render_term(os, t->args[0]);
      os << ')';
      return;
    case TermKind::Read:
    case TermKind::Count:
      break;
  }
  throw std::invalid_argument("array read or cardinality term in solver emission: " +
                              to_string(t));
}

void render_formula(std::ostream& os, const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Lt:
      os << "(< ";
      render_term(os, f->lhs);
      os << ' ';
      render_term(os, f->rhs);
      os << ')';
      return;
    case FormulaKind::Eq:
      os << "(= ";
      render_term(os, f->lhs);
      os << ' ';
      render_term(os, f->rhs);
      os << ')';
      return;
    case FormulaKind::Cong:
      os << "(= (mod (- ";
      render_term(os, f->lhs);
      os << ' ';
      render_term(os, f->rhs);
      os << ") " << f->mod.str() << ") 0)";
      return;
    case FormulaKind::And:
      os << "(and";
      for (auto& a : f->args) {
        os << ' ';
        render_formula(os, a);
      }
      os << ')';
      return;
    case FormulaKind::Not:
      os << "(not ";
      render_formula(os, f->args[0]);
      os << ')';
      return;
    case FormulaKind::Exists:
      os << "(exists ((" << f->var << " Int)) ";
      render_formula(os, f->args[0]);
      os << ')';
      return;
  }
  throw std::invalid_argument("malformed formula");
}

std::set<std::string> script_constants(const FormulaPtr& f, const SymbolTable& symbols) {
  std::set<std::string> consts = symbols.params;
  consts.insert(symbols.vars.begin(), symbols.vars.end());
  FreeSymbols fs = free_symbols(f);
  consts.insert(fs.vars.begin(), fs.vars.end());
  consts.insert(fs.params.begin(), fs.params.end());
  return consts;
}

}  // namespace

std::string emit_script(const FormulaPtr& f, const SymbolTable& symbols,
                        const std::string& logic_override) {
  std::set<std::string> consts = script_constants(f, symbols);
  std::ostringstream os;
  os << "(set-logic "
     << (logic_override.empty() ? (has_quantifier(f) ? "LIA" : "QF_LIA") : logic_override)
     << ")\n";
  for (const auto& c : consts) os << "(declare-const " << c << " Int)\n";
  os << "(assert (>= N 0))\n";
  os << "(assert ";
  render_formula(os, f);
  os << ")\n(check-sat)\n(get-value (";
  bool first = true;
  for (const auto& c : consts) {
    if (!first) os << ' ';
    first = false;
    os << c;
  }
  os << "))\n";
  return os.str();
}

// --- process plumbing ---------------------------------------------------------

namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

struct ChildProcess {
  pid_t pid = -1;
  int to_child = -1;
  int from_child = -1;

  bool spawn(const std::string& exe, const std::vector<std::string>& args,
             std::string* err) {
    int in[2], out[2];
    if (pipe(in) != 0 || pipe(out) != 0) {
      *err = std::string("pipe: ") + std::strerror(errno);
      return false;
    }
    pid = fork();
    if (pid < 0) {
      *err = std::string("fork: ") + std::strerror(errno);
      return false;
    }
    if (pid == 0) {
      dup2(in[0], 0);
      dup2(out[1], 1);
      dup2(out[1], 2);  // solver chatter on stderr folds into the transcript
      for (int fd : {in[0], in[1], out[0], out[1]}) close(fd);
      std::vector<char*> argv;
      argv.push_back(const_cast<char*>(exe.c_str()));
      for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
      argv.push_back(nullptr);
      execvp(exe.c_str(), argv.data());
      _exit(127);
    }
    close(in[0]);
    close(out[1]);
    to_child = in[1];
    from_child = out[0];
    return true;
  }

  void close_stdin() {
    if (to_child >= 0) close(to_child);
    to_child = -1;
  }

  // Reaps the child, giving it a short grace period before SIGKILL.
  int reap() {
    if (pid < 0) return -1;
    int status = 0;
    for (int i = 0; i < 50; ++i) {
      pid_t r = waitpid(pid, &status, WNOHANG);
      if (r == pid) {
        pid = -1;
        return status;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    pid = -1;
    return status;
  }

  void kill_now() {
    if (pid < 0) return;
    kill(pid, SIGKILL);
    int status = 0;
    waitpid(pid, &status, 0);
    pid = -1;
  }

  ~ChildProcess() {
    close_stdin();
    if (from_child >= 0) close(from_child);
    kill_now();
  }
};

// Pulls more bytes into buf.  Returns 1 on data, 0 on EOF, -1 on deadline.
int pump(int fd, std::string& buf, Clock::time_point deadline) {
  for (;;) {
    auto now = Clock::now();
    if (now >= deadline) return -1;
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now);
    struct pollfd p = {fd, POLLIN, 0};
    int r = poll(&p, 1, std::max<int>(1, static_cast<int>(left.count())));
    if (r == 0) return -1;
    if (r < 0) {
      if (errno == EINTR) continue;
      return 0;
    }
    char tmp[4096];
    ssize_t n = read(fd, tmp, sizeof tmp);
    if (n < 0) {
      if (errno == EINTR) continue;
      return 0;
    }
    if (n == 0) return 0;
    buf.append(tmp, static_cast<size_t>(n));
    return 1;
  }
}

// Writes the whole string; false if the pipe closed underneath us.
bool write_all(int fd, const std::string& s) {
  size_t off = 0;
  while (off < s.size()) {
    ssize_t n = write(fd, s.data() + off, s.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    off += static_cast<size_t>(n);
  }
  return true;
}

std::optional<Int> parse_value(const SExpr& e) {
  if (e.is_number()) return Int(e.text);
  if (e.is_list() && e.items.size() == 2 && e.items[0].atom && e.items[0].text == "-" &&
      e.items[1].is_number())
    return -Int(e.items[1].text);
  return std::nullopt;
}

// Collects (name value) pairs from get-value output.
bool parse_value_pairs(const std::string& text, std::map<std::string, Int>& out) {
  try {
    for (const SExpr& top : read_sexprs(text)) {
      if (!top.is_list()) return false;
      for (const SExpr& pair : top.items) {
        if (!pair.is_list() || pair.items.size() != 2 || !pair.items[0].is_symbol())
          return false;
        auto v = parse_value(pair.items[1]);
        if (!v) return false;
        out[pair.items[0].text] = *v;
      }
    }
  } catch (const ParseError&) {
    return false;
  }
  return true;
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

SolverVerdict run_solver(const std::string& script, const SolverConfig& cfg) {
  ignore_sigpipe();
  if (cfg.timeout_ms <= 0) return SolverVerdict::error("timeout must be positive");
  if (cfg.executable.empty()) return SolverVerdict::error("no solver executable configured");

  ChildProcess ch;
  std::string err;
  if (!ch.spawn(cfg.executable, cfg.args, &err)) return SolverVerdict::error(err);

  auto deadline = Clock::now() + std::chrono::milliseconds(cfg.timeout_ms);
  // Scripts are tiny relative to pipe buffers; a failed write just means the
  // child is gone, and the transcript will say why.
  write_all(ch.to_child, script);
  ch.close_stdin();

  std::string out;
  for (;;) {
    int r = pump(ch.from_child, out, deadline);
    if (r == 0) break;
    if (r < 0) {
      ch.kill_now();
      return SolverVerdict::unknown("timeout");
    }
  }
  int status = ch.reap();

  // First verdict token wins; (error ...) lines are collected as detail.
  std::istringstream lines(out);
  std::string line, detail, tail;
  bool sat = false;
  while (std::getline(lines, line)) {
    std::string t = trimmed(line);
    if (sat) {
      if (t.rfind("(error", 0) != 0) tail += line + "\n";
      continue;
    }
    if (t == "sat") {
      sat = true;
    } else if (t == "unsat") {
      return SolverVerdict::unsat();
    } else if (t == "unknown") {
      return SolverVerdict::unknown(detail.empty() ? "solver reported unknown" : detail);
    } else if (!t.empty()) {
      detail += t + "\n";
    }
  }
  if (sat) {
    std::map<std::string, Int> values;
    if (!parse_value_pairs(tail, values))
      return SolverVerdict::error("unparsable model output: " + trimmed(tail));
    return SolverVerdict::sat(std::move(values));
  }
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
    return SolverVerdict::error("cannot execute solver: " + cfg.executable);
  return SolverVerdict::error(detail.empty() ? "no verdict in solver output"
                                             : trimmed(detail));
}

// --- sessions -----------------------------------------------------------------

namespace {

class ProcessSession final : public Session {
 public:
  explicit ProcessSession(SolverConfig cfg) : cfg_(std::move(cfg)) {
    ignore_sigpipe();
    if (cfg_.timeout_ms <= 0) {
      die("timeout must be positive");
      return;
    }
    std::string err;
    if (!ch_.spawn(cfg_.executable, cfg_.args, &err)) {
      die(err);
      return;
    }
    declared_.push_back({});
    send("(set-logic " + (cfg_.logic.empty() ? std::string("ALL") : cfg_.logic) + ")\n");
  }

  ~ProcessSession() override {
    if (!dead_) send("(exit)\n");
    ch_.close_stdin();
    ch_.reap();
  }

  void assert_formula(const FormulaPtr& f) override {
    if (dead_) return;  // the next check() reports the failure
    std::ostringstream os;
    FreeSymbols fs = free_symbols(f);
    fs.vars.insert(fs.params.begin(), fs.params.end());
    for (const auto& s : fs.vars) {
      if (is_declared(s)) continue;
      declared_.back().insert(s);
      os << "(declare-const " << s << " Int)\n";
      if (s == "N") os << "(assert (>= N 0))\n";
    }
    os << "(assert ";
    render_formula(os, f);
    os << ")\n";
    send(os.str());
  }

  void push() override {
    if (dead_) return;
    declared_.push_back({});
    send("(push 1)\n");
  }

  void pop() override {
    if (declared_.size() <= 1) throw std::logic_error("session pop at base scope");
    if (dead_) return;
    declared_.pop_back();
    send("(pop 1)\n");
  }

  SolverVerdict check() override {
    if (dead_) return SolverVerdict::error(reason_);
    auto deadline = Clock::now() + std::chrono::milliseconds(cfg_.timeout_ms);
    send("(check-sat)\n");
    if (dead_) return SolverVerdict::error(reason_);

    std::string detail;
    std::string verdict = read_token_line(deadline, detail);
    if (dead_) return timed_out_ ? SolverVerdict::unknown("timeout")
                                 : SolverVerdict::error(reason_);
    if (verdict == "unsat") return SolverVerdict::unsat();
    if (verdict == "unknown")
      return SolverVerdict::unknown(detail.empty() ? "solver reported unknown" : detail);
    if (verdict != "sat") {
      die("unexpected solver answer: " + verdict);
      return SolverVerdict::error(reason_);
    }

    std::vector<std::string> names;
    for (const auto& scope : declared_)
      names.insert(names.end(), scope.begin(), scope.end());
    if (names.empty()) return SolverVerdict::sat({});

    std::ostringstream q;
    q << "(get-value (";
    for (size_t i = 0; i < names.size(); ++i) q << (i ? " " : "") << names[i];
    q << "))\n";
    send(q.str());
    if (dead_) return SolverVerdict::error(reason_);

    std::string block = read_balanced(deadline);
    if (dead_) return timed_out_ ? SolverVerdict::unknown("timeout")
                                 : SolverVerdict::error(reason_);
    std::map<std::string, Int> values;
    if (!parse_value_pairs(block, values)) {
      die("unparsable model output: " + trimmed(block));
      return SolverVerdict::error(reason_);
    }
    return SolverVerdict::sat(std::move(values));
  }

 private:
  bool is_declared(const std::string& s) const {
    for (const auto& scope : declared_)
      if (scope.count(s)) return true;
    return false;
  }

  void die(std::string why) {
    dead_ = true;
    reason_ = std::move(why);
    ch_.kill_now();
  }

  void send(const std::string& s) {
    if (dead_) return;
    if (!write_all(ch_.to_child, s)) die("solver pipe closed");
  }

  // Next nonempty line that is not an (error ...) report.
  std::string read_token_line(Clock::time_point deadline, std::string& detail) {
    for (;;) {
      size_t nl = rbuf_.find('\n');
      if (nl == std::string::npos) {
        int r = pump(ch_.from_child, rbuf_, deadline);
        if (r == 0) {
          die("solver exited");
          return "";
        }
        if (r < 0) {
          timed_out_ = true;
          die("timeout");
          return "";
        }
        continue;
      }
      std::string line = trimmed(rbuf_.substr(0, nl));
      rbuf_.erase(0, nl + 1);
      if (line.empty() || line == "success") continue;
      if (line.rfind("(error", 0) == 0) {
        detail += line + "\n";
        continue;
      }
      return line;
    }
  }

  // One balanced s-expression (the get-value response).
  std::string read_balanced(Clock::time_point deadline) {
    size_t pos = 0;
    int depth = 0;
    size_t start = std::string::npos;
    for (;;) {
      for (; pos < rbuf_.size(); ++pos) {
        char c = rbuf_[pos];
        if (c == '(') {
          if (depth == 0) start = pos;
          ++depth;
        } else if (c == ')') {
          if (depth > 0 && --depth == 0) {
            std::string block = rbuf_.substr(start, pos - start + 1);
            rbuf_.erase(0, pos + 1);
            return block;
          }
        }
      }
      int r = pump(ch_.from_child, rbuf_, deadline);
      if (r == 0) {
        die("solver exited");
        return "";
      }
      if (r < 0) {
        timed_out_ = true;
        die("timeout");
        return "";
      }
    }
  }

  SolverConfig cfg_;
  ChildProcess ch_;
  std::vector<std::set<std::string>> declared_;
  std::string rbuf_;
  bool dead_ = false;
  bool timed_out_ = false;
  std::string reason_;
};

class BuiltinSession final : public Session {
 public:
  void assert_formula(const FormulaPtr& f) override { scopes_.back().push_back(f); }

  void push() override { scopes_.push_back({}); }

  void pop() override {
    if (scopes_.size() <= 1) throw std::logic_error("session pop at base scope");
    scopes_.pop_back();
  }

  SolverVerdict check() override {
    std::vector<FormulaPtr> all;
    all.push_back(mk_le(mk_num(0), mk_param("N")));
    for (const auto& scope : scopes_)
      all.insert(all.end(), scope.begin(), scope.end());
    FormulaPtr conj = mk_and(std::move(all));

    // A model from an earlier check often still works after a pop or a
    // compatible assert; test it before solving from scratch.
    if (cache_ && !has_quantifier(conj) && lia::to_nnf(conj).eval(*cache_)) {
      std::map<std::string, Int> values = *cache_;
      FreeSymbols fs = free_symbols(conj);
      for (const auto& v : fs.vars)
        if (!values.count(v)) values[v] = 0;
      for (const auto& p : fs.params)
        if (!values.count(p)) values[p] = 0;
      return SolverVerdict::sat(std::move(values));
    }

    auto m = lia::solve(conj);
    if (!m) return SolverVerdict::unsat();
    cache_ = m;
    return SolverVerdict::sat(*m);
  }

 private:
  std::vector<std::vector<FormulaPtr>> scopes_{1};
  std::optional<lia::Model> cache_;
};

}  // namespace

std::unique_ptr<Session> open_session(const SolverConfig& cfg) {
  if (cfg.executable.empty()) return std::make_unique<BuiltinSession>();
  return std::make_unique<ProcessSession>(cfg);
}

// --- the SMT-LIB2 interpreter (arca-smt) ---------------------------------------

namespace {

struct SmtSyntaxError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Interp {
  std::ostream& out;
  std::vector<std::vector<FormulaPtr>> scopes{1};
  std::vector<std::set<std::string>> declared{1};
  std::optional<lia::Model> model;
  bool done = false;

  void respond(const std::string& s) { out << s << "\n" << std::flush; }
  void report_error(const std::string& msg) { respond("(error \"" + msg + "\")"); }

  bool is_declared(const std::string& s) const {
    for (const auto& scope : declared)
      if (scope.count(s)) return true;
    return false;
  }

  // ---- term / formula translation (SMT-LIB2 -> AST) ----

  static void need(bool ok, const std::string& msg) {
    if (!ok) throw SmtSyntaxError(msg);
  }

  Int numeral(const SExpr& e) {
    if (e.is_number()) return Int(e.text);
    if (e.is_list() && e.items.size() == 2 && e.items[0].atom && e.items[0].text == "-" &&
        e.items[1].is_number())
      return -Int(e.items[1].text);
    throw SmtSyntaxError("expected an integer literal");
  }

  TermPtr term(const SExpr& e, std::vector<std::string>& bound) {
    if (e.atom) {
      if (e.is_number()) return mk_num(Int(e.text));
      need(std::find(bound.rbegin(), bound.rend(), e.text) != bound.rend() ||
               is_declared(e.text),
           "undeclared symbol: " + e.text);
      return mk_var(e.text);
    }
    need(!e.items.empty() && e.items[0].is_symbol(), "expected a term");
    const std::string& op = e.items[0].text;
    size_t n = e.items.size() - 1;
    if (op == "+") {
      need(n >= 1, "+ needs arguments");
      std::vector<TermPtr> parts;
      for (size_t i = 1; i < e.items.size(); ++i) parts.push_back(term(e.items[i], bound));
      return mk_add(std::move(parts));
    }
    if (op == "-") {
      need(n >= 1, "- needs arguments");
      if (n == 1) return mk_neg(term(e.items[1], bound));
      TermPtr acc = term(e.items[1], bound);
      for (size_t i = 2; i < e.items.size(); ++i)
        acc = mk_add(acc, mk_neg(term(e.items[i], bound)));
      return acc;
    }
    if (op == "*") {
      need(n >= 1, "* needs arguments");
      Int k = 1;
      TermPtr sym;
      for (size_t i = 1; i < e.items.size(); ++i) {
        TermPtr t = term(e.items[i], bound);
        if (auto c = eval_ground_term(t)) {
          k *= *c;
        } else {
          need(!sym, "nonlinear product");
          sym = t;
        }
      }
      return sym ? mk_mul(k, sym) : mk_num(k);
    }
    if (op == "mod") throw SmtSyntaxError("mod is only supported as (= (mod t n) r)");
    throw SmtSyntaxError("unsupported term operator: " + op);
  }

  // (mod t n) with a positive literal modulus, or null.
  const SExpr* mod_form(const SExpr& e) {
    if (e.is_list() && e.items.size() == 3 && e.items[0].atom && e.items[0].text == "mod")
      return &e;
    return nullptr;
  }

  FormulaPtr eq_pair(const SExpr& sa, const SExpr& sb, std::vector<std::string>& bound) {
    const SExpr* ma = mod_form(sa);
    const SExpr* mb = mod_form(sb);
    need(!(ma && mb), "mod on both sides of = is not supported");
    if (!ma && !mb) return mk_eq(term(sa, bound), term(sb, bound));
    const SExpr& m = ma ? *ma : *mb;
    const SExpr& other = ma ? sb : sa;
    Int mod = numeral(m.items[2]);
    need(mod >= 1, "modulus must be >= 1");
    TermPtr t = term(m.items[1], bound);
    TermPtr r = term(other, bound);
    // (= (mod t n) r) pins r to the canonical residue range.
    return mk_and({mk_cong(mod, t, r), mk_le(mk_num(0), r), mk_lt(r, mk_num(mod))});
  }

  FormulaPtr formula(const SExpr& e, std::vector<std::string>& bound) {
    if (e.atom) {
      if (e.text == "true") return mk_true();
      if (e.text == "false") return mk_false();
      throw SmtSyntaxError("expected a formula, got: " + e.text);
    }
    need(!e.items.empty() && e.items[0].is_symbol(), "expected a formula");
    const std::string& op = e.items[0].text;
    size_t n = e.items.size() - 1;

    auto sub = [&](size_t i) { return formula(e.items[i], bound); };

    if (op == "and" || op == "or") {
      need(n >= 1, op + " needs arguments");
      std::vector<FormulaPtr> kids;
      for (size_t i = 1; i < e.items.size(); ++i) kids.push_back(sub(i));
      return op == "and" ? mk_and(std::move(kids)) : mk_or(std::move(kids));
    }
    if (op == "not") {
      need(n == 1, "not needs one argument");
      return mk_not(sub(1));
    }
    if (op == "=>") {
      need(n >= 2, "=> needs two or more arguments");
      FormulaPtr acc = sub(e.items.size() - 1);
      for (size_t i = e.items.size() - 1; i-- > 1;) acc = mk_implies(sub(i), acc);
      return acc;
    }
    if (op == "exists" || op == "forall") {
      need(n == 2 && e.items[1].is_list() && !e.items[1].items.empty(),
           op + " needs a binder list and a body");
      std::vector<std::string> names;
      for (const SExpr& b : e.items[1].items) {
        need(b.is_list() && b.items.size() == 2 && b.items[0].is_symbol() &&
                 b.items[1].atom && b.items[1].text == "Int",
             "binders must be (name Int)");
        names.push_back(b.items[0].text);
        bound.push_back(b.items[0].text);
      }
      FormulaPtr body = formula(e.items[2], bound);
      bound.resize(bound.size() - names.size());
      if (op == "forall") body = mk_not(body);
      for (size_t i = names.size(); i-- > 0;) body = mk_exists(names[i], body);
      return op == "forall" ? mk_not(body) : body;
    }
    if (op == "<" || op == "<=" || op == ">" || op == ">=") {
      need(n >= 2, op + " needs two or more arguments");
      std::vector<FormulaPtr> chain;
      for (size_t i = 1; i + 1 < e.items.size(); ++i) {
        TermPtr a = term(e.items[i], bound);
        TermPtr b = term(e.items[i + 1], bound);
        if (op == "<")
          chain.push_back(mk_lt(a, b));
        else if (op == "<=")
          chain.push_back(mk_le(a, b));
        else if (op == ">")
          chain.push_back(mk_lt(b, a));
        else
          chain.push_back(mk_le(b, a));
      }
      return mk_and(std::move(chain));
    }
    if (op == "=") {
      need(n >= 2, "= needs two or more arguments");
      std::vector<FormulaPtr> chain;
      for (size_t i = 1; i + 1 < e.items.size(); ++i)
        chain.push_back(eq_pair(e.items[i], e.items[i + 1], bound));
      return mk_and(std::move(chain));
    }
    if (op == "distinct") {
      need(n >= 2, "distinct needs two or more arguments");
      std::vector<FormulaPtr> chain;
      for (size_t i = 1; i < e.items.size(); ++i)
        for (size_t j = i + 1; j < e.items.size(); ++j)
          chain.push_back(mk_not(eq_pair(e.items[i], e.items[j], bound)));
      return mk_and(std::move(chain));
    }
    throw SmtSyntaxError("unsupported connective: " + op);
  }

  // ---- command dispatch ----

  void handle(const SExpr& e) {
    if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol()) {
      report_error("malformed command");
      return;
    }
    const std::string& cmd = e.items[0].text;
    try {
      dispatch(cmd, e);
    } catch (const std::exception& ex) {
      report_error(ex.what());
    }
  }

  void dispatch(const std::string& cmd, const SExpr& e) {
    size_t n = e.items.size() - 1;
    if (cmd == "set-logic" || cmd == "set-info" || cmd == "set-option") return;
    if (cmd == "declare-const") {
      need(n == 2 && e.items[1].is_symbol() && e.items[2].atom && e.items[2].text == "Int",
           "usage: (declare-const name Int)");
      declare(e.items[1].text);
      return;
    }
    if (cmd == "declare-fun") {
      need(n == 3 && e.items[1].is_symbol() && e.items[2].is_list() &&
               e.items[3].atom && e.items[3].text == "Int",
           "usage: (declare-fun name () Int)");
      need(e.items[2].items.empty(), "only nullary functions (constants) are supported");
      declare(e.items[1].text);
      return;
    }
    if (cmd == "assert") {
      need(n == 1, "usage: (assert formula)");
      std::vector<std::string> bound;
      scopes.back().push_back(formula(e.items[1], bound));
      model.reset();
      return;
    }
    if (cmd == "check-sat") {
      std::vector<FormulaPtr> all;
      for (const auto& scope : scopes) all.insert(all.end(), scope.begin(), scope.end());
      model = lia::solve(mk_and(std::move(all)));
      respond(model ? "sat" : "unsat");
      return;
    }
    if (cmd == "get-value") {
      need(n == 1 && e.items[1].is_list(), "usage: (get-value (names...))");
      if (!model) {
        report_error("model is not available");
        return;
      }
      std::ostringstream os;
      os << '(';
      bool first = true;
      for (const SExpr& s : e.items[1].items) {
        need(s.is_symbol(), "get-value arguments must be constants");
        auto it = model->find(s.text);
        Int v = it == model->end() ? Int(0) : it->second;
        os << (first ? "" : " ") << '(' << s.text << ' ';
        render_int(os, v);
        os << ')';
        first = false;
      }
      os << ')';
      respond(os.str());
      return;
    }
    if (cmd == "push" || cmd == "pop") {
      Int k = 1;
      if (n == 1) k = numeral(e.items[1]);
      need(n <= 1 && k >= 0, "usage: (push k) / (pop k)");
      if (cmd == "push") {
        for (Int i = 0; i < k; ++i) {
          scopes.push_back({});
          declared.push_back({});
        }
      } else {
        need(k < Int(scopes.size()), "pop below the base scope");
        for (Int i = 0; i < k; ++i) {
          scopes.pop_back();
          declared.pop_back();
        }
      }
      model.reset();
      return;
    }
    if (cmd == "reset") {
      scopes.assign(1, {});
      declared.assign(1, {});
      model.reset();
      return;
    }
    if (cmd == "echo") {
      need(n == 1 && e.items[1].atom, "usage: (echo \"text\")");
      std::string s = e.items[1].text;
      if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
        s = s.substr(1, s.size() - 2);
      respond(s);
      return;
    }
    if (cmd == "exit") {
      done = true;
      return;
    }
    throw SmtSyntaxError("unsupported command: " + cmd);
  }

  void declare(const std::string& name) {
    need(!is_declared(name), "already declared: " + name);
    declared.back().insert(name);
  }
};

}  // namespace

int run_smtlib(std::istream& in, std::ostream& out) {
  Interp interp{out};
  std::string buf;
  int depth = 0;
  bool comment = false;
  char c;
  while (!interp.done && in.get(c)) {
    if (comment) {
      if (c == '\n') comment = false;
      continue;
    }
    if (c == ';') {
      comment = true;
      if (depth > 0) buf.push_back(' ');  // keep a token boundary
      continue;
    }
    if (depth == 0 && std::isspace(static_cast<unsigned char>(c))) continue;
    if (depth == 0 && c != '(') {
      interp.report_error("commands must be parenthesized");
      // Swallow the rest of the stray token.
      while (in.get(c) && !std::isspace(static_cast<unsigned char>(c))) {
      }
      continue;
    }
    buf.push_back(c);
    if (c == '(') ++depth;
    if (c == ')' && --depth == 0) {
      try {
        for (const SExpr& e : read_sexprs(buf)) interp.handle(e);
      } catch (const ParseError& ex) {
        interp.report_error(ex.what());
      }
      buf.clear();
    }
  }
  return 0;
}

}  // namespace arca::smt
