#include "ncs/bench.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <json.hpp>

#include "ncs/errors.hpp"
#include "ncs/eval.hpp"
#include "ncs/mip.hpp"
#include "ncs/synth.hpp"

namespace ncs {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string env_or_empty(const char* name) {
  const char* v = std::getenv(name);
  return v ? v : "";
}

bool known_method(const std::string& m) {
  return m == "sat" || m == "sat-external" || m == "mip-o" || m == "mip-d";
}

}  // namespace

BenchConfig bench_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad benchmark config: ") + e.what());
  }
  BenchConfig cfg;
  try {
    if (j.contains("criteria")) cfg.criteria = j["criteria"].get<std::vector<int>>();
    if (j.contains("classes")) cfg.classes = j["classes"].get<std::vector<int>>();
    if (j.contains("alternatives")) cfg.alternatives = j["alternatives"].get<std::vector<int>>();
    if (j.contains("trials")) cfg.trials = j["trials"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<uint64_t>();
    if (j.contains("methods")) cfg.methods = j["methods"].get<std::vector<std::string>>();
    if (j.contains("budget")) {
      const auto& b = j["budget"];
      if (b.contains("max_conflicts")) cfg.budget.max_conflicts = b["max_conflicts"].get<uint64_t>();
      if (b.contains("max_seconds")) cfg.budget.max_seconds = b["max_seconds"].get<double>();
    }
    if (j.contains("sat_cmd")) cfg.sat_cmd = j["sat_cmd"].get<std::string>();
    if (j.contains("mip_cmd")) cfg.mip_cmd = j["mip_cmd"].get<std::string>();
    if (j.contains("threads")) cfg.threads = j["threads"].get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad benchmark config: ") + e.what());
  }
  return cfg;
}

namespace {

struct Cell {
  int n_criteria, n_classes, n_alts;
  size_t index;
};

void check_config(const BenchConfig& cfg) {
  if (cfg.criteria.empty() || cfg.classes.empty() || cfg.alternatives.empty()) {
    throw InputError("benchmark grids must be non-empty");
  }
  if (cfg.trials < 1) throw InputError("at least one trial per cell is required");
  if (cfg.methods.empty()) throw InputError("no methods configured");
  for (const auto& m : cfg.methods) {
    if (!known_method(m)) throw InputError("unknown method: " + m);
  }
}

// Everything a method needs from one generated trial.
struct TrialContext {
  const BenchConfig* cfg;
  const UncsModel* truth;
  const LearningSet* data;
  int n_criteria, n_classes, n_alts, trial;
  uint64_t seed;
};

BenchRow base_row(const TrialContext& t, const std::string& method) {
  BenchRow row;
  row.method = method;
  row.n_criteria = t.n_criteria;
  row.n_classes = t.n_classes;
  row.n_alts = t.n_alts;
  row.trial = t.trial;
  row.seed = t.seed;
  return row;
}

void finish_with_model(BenchRow& row, const TrialContext& t, const UncsModel& model) {
  row.success = true;
  row.extends = extends(model, *t.data).empty();
  row.err_rate = err_rate(*t.truth, model, default_sample_size(t.n_criteria),
                          derive_seed(t.seed, 2), /*parallel=*/false);
}

BenchRow run_sat_method(const TrialContext& t, bool external) {
  BenchRow row = base_row(t, external ? "sat-external" : "sat");
  std::string cmd;
  if (external) {
    cmd = !t.cfg->sat_cmd.empty() ? t.cfg->sat_cmd : env_or_empty("NCS_SAT_CMD");
    if (cmd.empty()) {
      row.failure = "no-solver";
      return row;
    }
  }
  const auto t0 = Clock::now();
  const CnfInstance cnf = encode(*t.data, /*parallel=*/false);
  row.encode_ms = ms_since(t0);
  row.n_vars = cnf.var_count();
  row.n_clauses = cnf.clause_count();

  SolveResult result;
  try {
    if (external) {
      result = solve_external(cnf, cmd, t.cfg->budget.max_seconds);
    } else {
      SolverConfig sc;
      sc.max_conflicts = t.cfg->budget.max_conflicts;
      sc.max_seconds = t.cfg->budget.max_seconds;
      result = solve(cnf, sc);
    }
  } catch (const BridgeError&) {
    row.failure = "bridge";
    row.total_ms = ms_since(t0);
    return row;
  }
  row.solve_ms = result.stats.wall_ms;

  if (result.status == SolveStatus::budget_exceeded) {
    row.failure = "budget";
  } else if (result.status == SolveStatus::unsat) {
    row.failure = "infeasible";
  } else {
    const UncsModel model = decode(*cnf.vocabulary(), result.assignment);
    row.total_ms = ms_since(t0);
    finish_with_model(row, t, model);
    return row;
  }
  row.total_ms = ms_since(t0);
  return row;
}

BenchRow run_mip_method(const TrialContext& t, MipVariant variant) {
  BenchRow row = base_row(t, to_string(variant));
  const std::string cmd = !t.cfg->mip_cmd.empty() ? t.cfg->mip_cmd : env_or_empty("NCS_MIP_CMD");
  if (cmd.empty()) {
    row.failure = "no-solver";
    return row;
  }
  const auto t0 = Clock::now();
  const MipModel model = variant == MipVariant::optimizing ? encode_mip_o(*t.data)
                                                           : encode_mip_d(*t.data);
  row.encode_ms = ms_since(t0);
  row.n_vars = model.vars().size();
  row.n_clauses = model.rows().size();

  try {
    const MipRunResult run = solve_mip_external(model, cmd, t.cfg->budget.max_seconds);
    row.solve_ms = run.solve_ms;
    switch (run.status) {
      case MipRunStatus::budget_exceeded:
        row.failure = "budget";
        break;
      case MipRunStatus::infeasible:
        row.failure = "infeasible";
        break;
      case MipRunStatus::ok: {
        row.total_ms = ms_since(t0);
        finish_with_model(row, t, run.model->to_uncs());
        return row;
      }
    }
  } catch (const BridgeError&) {
    row.failure = "bridge";
  } catch (const FaithfulnessError&) {
    row.failure = "bridge";
  }
  row.total_ms = ms_since(t0);
  return row;
}

BenchRow run_method(const TrialContext& t, const std::string& method) {
  try {
    if (method == "sat") return run_sat_method(t, false);
    if (method == "sat-external") return run_sat_method(t, true);
    if (method == "mip-o") return run_mip_method(t, MipVariant::optimizing);
    return run_mip_method(t, MipVariant::decision);
  } catch (const std::exception&) {
    BenchRow row = base_row(t, method);
    row.failure = "error";
    return row;
  }
}

}  // namespace

std::vector<BenchRow> run_grid(const BenchConfig& cfg) {
  check_config(cfg);

  std::vector<Cell> cells;
  for (int n : cfg.criteria) {
    for (int p : cfg.classes) {
      for (int m : cfg.alternatives) {
        cells.push_back({n, p, m, cells.size()});
      }
    }
  }

  const size_t n_methods = cfg.methods.size();
  const size_t n_tasks = cells.size() * static_cast<size_t>(cfg.trials);
  std::vector<BenchRow> rows(n_tasks * n_methods);

  int workers = cfg.threads;
#ifdef _OPENMP
  if (workers <= 0) workers = omp_get_max_threads();
#else
  workers = 1;
#endif
  (void)workers;

#pragma omp parallel for schedule(dynamic) num_threads(workers)
  for (int64_t task = 0; task < static_cast<int64_t>(n_tasks); ++task) {
    const Cell& cell = cells[static_cast<size_t>(task) / static_cast<size_t>(cfg.trials)];
    const int trial = static_cast<int>(static_cast<size_t>(task) % static_cast<size_t>(cfg.trials));
    const uint64_t trial_seed = derive_seed(derive_seed(cfg.seed, cell.index), static_cast<uint64_t>(trial));

    GenConfig gen{cell.n_criteria, cell.n_classes, cell.n_alts, trial_seed};
    const Instance instance = gen_instance(gen);
    const UncsModel truth = instance.truth.to_uncs();

    TrialContext ctx{&cfg,          &truth,         &instance.data, cell.n_criteria,
                     cell.n_classes, cell.n_alts,   trial,          trial_seed};
    for (size_t mi = 0; mi < n_methods; ++mi) {
      rows[static_cast<size_t>(task) * n_methods + mi] = run_method(ctx, cfg.methods[mi]);
    }
  }
  return rows;
}

const char* const kBenchCsvHeader =
    "method,n_criteria,n_classes,n_alts,trial,seed,n_vars,n_clauses,encode_ms,solve_ms,total_ms,"
    "success,extends,err_rate,failure";

void write_bench_csv(const std::vector<BenchRow>& rows, std::ostream& out) {
  out << kBenchCsvHeader << '\n';
  char buf[64];
  for (const auto& r : rows) {
    out << r.method << ',' << r.n_criteria << ',' << r.n_classes << ',' << r.n_alts << ','
        << r.trial << ',' << r.seed << ',' << r.n_vars << ',' << r.n_clauses << ',';
    std::snprintf(buf, sizeof buf, "%.3f,%.3f,%.3f", r.encode_ms, r.solve_ms, r.total_ms);
    out << buf << ',' << (r.success ? "true" : "false") << ',' << (r.extends ? "true" : "false")
        << ',';
    if (r.err_rate >= 0) {
      std::snprintf(buf, sizeof buf, "%.6f", r.err_rate);
      out << buf;
    }
    out << ',' << r.failure << '\n';
  }
}

}  // namespace ncs
