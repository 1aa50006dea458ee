// Declared-symbol table: parameters (always including N), scalar variables,
// and array identifiers.  The three kinds are disjoint.
#pragma once

#include <set>
#include <stdexcept>
#include <string>

namespace arca {

enum class SymKind { None, Param, Var, Array };

struct SymbolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SymbolTable {
  std::set<std::string> params{"N"};
  std::set<std::string> vars;
  std::set<std::string> arrays;

  SymKind kind(const std::string& name) const {
    if (params.count(name)) return SymKind::Param;
    if (vars.count(name)) return SymKind::Var;
    if (arrays.count(name)) return SymKind::Array;
    return SymKind::None;
  }

  // User-facing declarations: validate the name, reject duplicates.
  void declare_param(const std::string& name) { declare(name, params); }
  void declare_var(const std::string& name) { declare(name, vars); }
  void declare_array(const std::string& name) { declare(name, arrays); }

  // Internal additions (fresh names from transformations); no validity checks.
  void add_var(const std::string& name) { vars.insert(name); }
  void add_param(const std::string& name) { params.insert(name); }
  void add_array(const std::string& name) { arrays.insert(name); }

 private:
  void declare(const std::string& name, std::set<std::string>& into) {
    if (name.empty()) throw SymbolError("empty symbol name");
    if (name.find('!') != std::string::npos)
      throw SymbolError("symbol '" + name + "': '!' is reserved for generated names");
    if (name == "N" || kind(name) != SymKind::None)
      throw SymbolError("symbol '" + name + "' already declared");
    into.insert(name);
  }
};

}  // namespace arca
