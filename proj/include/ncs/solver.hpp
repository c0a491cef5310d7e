#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncs/sat.hpp"

namespace ncs {

struct SolverConfig {
  uint64_t max_conflicts = 10'000'000;
  double max_seconds = 600.0;
  // First-implication-point clause learning with backjumping. Plain
  // chronological search (learning off) is kept for comparison but needs
  // exponentially many conflicts on learning-set encodings beyond toy sizes.
  bool clause_learning = true;
};

enum class SolveStatus { sat, unsat, budget_exceeded };

struct SolverStats {
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t conflicts = 0;
  double wall_ms = 0.0;
};

struct SolveResult {
  SolveStatus status;
  TruthAssignment assignment;  // total iff status == sat
  SolverStats stats;
  // Literals forced before any decision; true in every satisfying assignment.
  std::vector<int32_t> fixed_literals;
};

// Complete decision procedure. Deterministic: decisions pick the
// lowest-indexed unassigned variable and try false first.
SolveResult solve(const CnfInstance& cnf, const SolverConfig& config = {});

// Bridge to any DIMACS-conformant solver executable: writes the instance to
// a temporary file, runs `command <path>`, and parses competition-format
// output. Satisfiable answers are re-verified against the instance; any
// process, parse, or verification failure raises BridgeError rather than
// being reported as unsatisfiable. A positive timeout maps an overrunning or
// inconclusive solver to SolveStatus::budget_exceeded.
SolveResult solve_external(const CnfInstance& cnf, const std::string& command,
                           double timeout_seconds = 0.0);

// Independent clause-by-clause check, used to vet solver answers.
bool satisfies(const CnfInstance& cnf, const TruthAssignment& assignment);

}  // namespace ncs
