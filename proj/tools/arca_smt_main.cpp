// arca-smt: a self-contained SMT-LIB2 solver for linear integer arithmetic.
// Reads commands from a file argument or standard input, so it can serve as
// the external solver process when no system SMT solver is installed.
#include "arca/smt.hpp"

#include <csignal>
#include <fstream>
#include <iostream>
#include <string>

int main(int argc, char** argv) {
  std::signal(SIGPIPE, SIG_IGN);
  std::string path;
  for (int i = 1; i < argc; ++i) {
    std::string a = argv[i];
    if (a == "-in" || a == "--in" || a == "-smt2") continue;  // z3-style flags
    if (a == "-h" || a == "--help") {
      std::cout << "usage: arca-smt [script.smt2]\n"
                   "Reads SMT-LIB2 commands (stdin when no file is given) and\n"
                   "answers check-sat/get-value for linear integer arithmetic.\n";
      return 0;
    }
    if (!path.empty()) {
      std::cerr << "arca-smt: unexpected argument: " << a << "\n";
      return 1;
    }
    path = std::move(a);
  }
  if (path.empty()) return arca::smt::run_smtlib(std::cin, std::cout);
  std::ifstream in(path);
  if (!in) {
    std::cerr << "arca-smt: cannot open " << path << "\n";
    return 1;
  }
  return arca::smt::run_smtlib(in, std::cout);
}
