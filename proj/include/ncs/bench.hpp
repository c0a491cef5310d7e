#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ncs/solver.hpp"

namespace ncs {

struct BenchBudget {
  uint64_t max_conflicts = 10'000'000;
  double max_seconds = 600.0;
};

// Grid experiment over synthetic ground truths. Defaults cover the desk
// grid: |N| in {4..8}, p in {2,3}, learning sets of 16..128 alternatives,
// 20 trials per cell.
struct BenchConfig {
  std::vector<int> criteria{4, 5, 6, 7, 8};
  std::vector<int> classes{2, 3};
  std::vector<int> alternatives{16, 32, 64, 128};
  int trials = 20;
  uint64_t seed = 0;
  std::vector<std::string> methods{"sat"};
  BenchBudget budget;
  std::string sat_cmd;  // external method command templates; the environment
  std::string mip_cmd;  // variables NCS_SAT_CMD / NCS_MIP_CMD are fallbacks
  int threads = 0;      // 0 = library default worker count
};

BenchConfig bench_config_from_json(const std::string& text);

struct BenchRow {
  std::string method;
  int n_criteria = 0;
  int n_classes = 0;
  int n_alts = 0;
  int trial = 0;
  uint64_t seed = 0;
  uint64_t n_vars = 0;
  uint64_t n_clauses = 0;
  double encode_ms = 0.0;
  double solve_ms = 0.0;
  double total_ms = 0.0;
  bool success = false;
  bool extends = false;
  double err_rate = -1.0;  // negative = not measured
  std::string failure;     // "", "no-solver", "budget", "bridge", "infeasible", "error"
};

// One row per (cell, trial, method), in deterministic order. Trial seeds are
// derive_seed(derive_seed(master, cell_index), trial); partial failures are
// recorded per row and never abort the grid.
std::vector<BenchRow> run_grid(const BenchConfig& cfg);

extern const char* const kBenchCsvHeader;

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out);

}  // namespace ncs
