// Command-line front end for the embedded CNF solver: reads a DIMACS file
// and prints SAT-competition style output (`s` status line, `v` value lines).

#include <cstdio>
#include <iostream>
#include <string>

#include "ncs/io.hpp"
#include "ncs/sat.hpp"
#include "ncs/solver.hpp"

namespace {

void print_values(const ncs::TruthAssignment& assignment) {
  std::string line = "v";
  for (uint32_t v = 1; v <= assignment.var_count(); ++v) {
    line += ' ';
    if (!assignment.value(v)) line += '-';
    line += std::to_string(v);
    if (line.size() > 3800) {
      std::puts(line.c_str());
      line = "v";
    }
  }
  line += " 0";
  std::puts(line.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  ncs::SolverConfig config;
  std::string path;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--no-learn") {
      config.clause_learning = false;
    } else if (arg == "--max-conflicts" && i + 1 < argc) {
      config.max_conflicts = std::stoull(argv[++i]);
    } else if (arg == "--max-seconds" && i + 1 < argc) {
      config.max_seconds = std::stod(argv[++i]);
    } else if (!arg.empty() && arg[0] == '-') {
      std::cerr << "usage: ncs-sat [--no-learn] [--max-conflicts N] [--max-seconds S] <file.cnf>\n";
      return 2;
    } else {
      path = arg;
    }
  }
  if (path.empty()) {
    std::cerr << "usage: ncs-sat [--no-learn] [--max-conflicts N] [--max-seconds S] <file.cnf>\n";
    return 2;
  }

  try {
    const ncs::CnfInstance cnf = ncs::read_dimacs(ncs::read_text_file(path));
    const ncs::SolveResult result = ncs::solve(cnf, config);
    switch (result.status) {
      case ncs::SolveStatus::sat:
        std::puts("s SATISFIABLE");
        print_values(result.assignment);
        return 10;
      case ncs::SolveStatus::unsat:
        std::puts("s UNSATISFIABLE");
        return 20;
      case ncs::SolveStatus::budget_exceeded:
        std::puts("s UNKNOWN");
        return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "ncs-sat: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
