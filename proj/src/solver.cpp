#include "ncs/solver.hpp"

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <random>

#include "ncs/errors.hpp"
#include "ncs/io.hpp"

namespace ncs {

namespace {

using Clock = std::chrono::steady_clock;

struct Clause {
  std::vector<int32_t> lits;
};

class Search {
 public:
  Search(const CnfInstance& cnf, const SolverConfig& config)
      : nvars_(cnf.var_count()),
        config_(config),
        val_(nvars_ + 1, 0),
        level_(nvars_ + 1, 0),
        reason_(nvars_ + 1, -1),
        seen_(nvars_ + 1, 0),
        watches_(2 * (nvars_ + 1)) {
    clauses_.reserve(cnf.clause_count());
    for (size_t c = 0; c < cnf.clause_count(); ++c) {
      const auto lits = cnf.clause(c);
      if (lits.size() == 1) {
        initial_units_.push_back(lits[0]);
        continue;
      }
      Clause cl;
      cl.lits.assign(lits.begin(), lits.end());
      const auto idx = static_cast<uint32_t>(clauses_.size());
      clauses_.push_back(std::move(cl));
      attach(idx);
    }
  }

  SolveResult run() {
    const auto start = Clock::now();
    SolveResult result;
    result.status = search();
    result.stats = stats_;
    result.stats.wall_ms =
        std::chrono::duration<double, std::milli>(Clock::now() - start).count();
    for (int32_t lit : trail_) {
      if (level_[var_of(lit)] == 0) result.fixed_literals.push_back(lit);
    }
    if (result.status == SolveStatus::sat) {
      result.assignment = TruthAssignment(nvars_);
      for (uint32_t v = 1; v <= nvars_; ++v) result.assignment.set(v, val_[v] > 0);
    }
    return result;
  }

 private:
  // Literals are DIMACS-style signed ints. Watch lists are indexed by
  // 2*var + (lit < 0).
  static uint32_t var_of(int32_t lit) { return static_cast<uint32_t>(lit < 0 ? -lit : lit); }
  static size_t watch_index(int32_t lit) {
    return 2 * static_cast<size_t>(var_of(lit)) + (lit < 0 ? 1 : 0);
  }
  int lit_value(int32_t lit) const {
    const int8_t v = val_[var_of(lit)];
    return lit < 0 ? -v : v;
  }

  void attach(uint32_t clause_idx) {
    const auto& c = clauses_[clause_idx];
    watches_[watch_index(c.lits[0])].push_back(clause_idx);
    watches_[watch_index(c.lits[1])].push_back(clause_idx);
  }

  uint32_t current_level() const {
    return config_.clause_learning ? static_cast<uint32_t>(trail_lim_.size())
                                   : static_cast<uint32_t>(frames_.size());
  }

  void assign(int32_t lit, int32_t reason_clause) {
    const uint32_t v = var_of(lit);
    val_[v] = lit > 0 ? 1 : -1;
    level_[v] = current_level();
    reason_[v] = reason_clause;
    trail_.push_back(lit);
  }

  void unassign_to(size_t trail_size) {
    while (trail_.size() > trail_size) {
      val_[var_of(trail_.back())] = 0;
      trail_.pop_back();
    }
    qhead_ = std::min(qhead_, trail_.size());
  }

  // Returns the conflicting clause index, or -1.
  int64_t propagate() {
    while (qhead_ < trail_.size()) {
      const int32_t p = trail_[qhead_++];
      const int32_t false_lit = -p;
      auto& ws = watches_[watch_index(false_lit)];
      size_t keep = 0;
      for (size_t i = 0; i < ws.size(); ++i) {
        const uint32_t ci = ws[i];
        auto& lits = clauses_[ci].lits;
        if (lits[0] == false_lit) std::swap(lits[0], lits[1]);
        if (lit_value(lits[0]) > 0) {
          ws[keep++] = ci;
          continue;
        }
        bool moved = false;
        for (size_t k = 2; k < lits.size(); ++k) {
          if (lit_value(lits[k]) >= 0) {
            std::swap(lits[1], lits[k]);
            watches_[watch_index(lits[1])].push_back(ci);
            moved = true;
            break;
          }
        }
        if (moved) continue;
        ws[keep++] = ci;  // still watching the false literal
        if (lit_value(lits[0]) < 0) {
          for (size_t j = i + 1; j < ws.size(); ++j) ws[keep++] = ws[j];
          ws.resize(keep);
          qhead_ = trail_.size();
          return static_cast<int64_t>(ci);
        }
        ++stats_.propagations;
        assign(lits[0], static_cast<int32_t>(ci));
      }
      ws.resize(keep);
    }
    return -1;
  }

  uint32_t next_unassigned() {
    while (cursor_ <= nvars_ && val_[cursor_] != 0) ++cursor_;
    return cursor_ <= nvars_ ? cursor_ : 0;
  }

  bool budget_hit() {
    if (stats_.conflicts >= config_.max_conflicts) return true;
    if ((stats_.conflicts & 0x3FF) == 0) {
      const double elapsed =
          std::chrono::duration<double>(Clock::now() - start_time_).count();
      if (elapsed > config_.max_seconds) return true;
    }
    return false;
  }

  SolveStatus search() {
    start_time_ = Clock::now();
    for (int32_t u : initial_units_) {
      if (lit_value(u) < 0) return SolveStatus::unsat;
      if (lit_value(u) == 0) assign(u, -1);
    }
    return config_.clause_learning ? search_cdcl() : search_dpll();
  }

  // Depth-first search with chronological backtracking: each decision tries
  // false first and flips once before giving up on its subtree.
  SolveStatus search_dpll() {
    for (;;) {
      if (propagate() >= 0) {
        ++stats_.conflicts;
        if (budget_hit()) return SolveStatus::budget_exceeded;
        while (!frames_.empty() && frames_.back().flipped) {
          unassign_to(frames_.back().trail_size);
          cursor_ = frames_.back().cursor;
          frames_.pop_back();
        }
        if (frames_.empty()) return SolveStatus::unsat;
        Frame& f = frames_.back();
        unassign_to(f.trail_size);
        cursor_ = f.cursor;
        f.flipped = true;
        assign(-f.decision, -1);
        continue;
      }
      const uint32_t v = next_unassigned();
      if (v == 0) return SolveStatus::sat;
      ++stats_.decisions;
      frames_.push_back({-static_cast<int32_t>(v), false, trail_.size(), cursor_});
      assign(-static_cast<int32_t>(v), -1);
    }
  }

  SolveStatus search_cdcl() {
    for (;;) {
      const int64_t confl = propagate();
      if (confl >= 0) {
        ++stats_.conflicts;
        if (budget_hit()) return SolveStatus::budget_exceeded;
        if (current_level() == 0) return SolveStatus::unsat;
        analyze(static_cast<uint32_t>(confl));
        continue;
      }
      const uint32_t v = next_unassigned();
      if (v == 0) return SolveStatus::sat;
      ++stats_.decisions;
      trail_lim_.push_back(trail_.size());
      assign(-static_cast<int32_t>(v), -1);
    }
  }

  // First-implication-point conflict analysis; asserts the learned clause
  // after backjumping to the second-highest decision level in it.
  void analyze(uint32_t confl) {
    learned_.clear();
    learned_.push_back(0);  // room for the asserting literal
    int counter = 0;
    int32_t p = 0;
    size_t index = trail_.size();

    for (;;) {
      const auto& lits = clauses_[confl].lits;
      for (size_t k = (p == 0 ? 0 : 1); k < lits.size(); ++k) {
        const int32_t q = lits[k];
        const uint32_t vq = var_of(q);
        if (seen_[vq] || level_[vq] == 0) continue;
        seen_[vq] = 1;
        if (level_[vq] == current_level()) {
          ++counter;
        } else {
          learned_.push_back(q);
        }
      }
      while (!seen_[var_of(trail_[index - 1])]) --index;
      --index;
      p = trail_[index];
      seen_[var_of(p)] = 0;
      if (--counter == 0) break;
      confl = static_cast<uint32_t>(reason_[var_of(p)]);
    }
    learned_[0] = -p;
    for (size_t k = 1; k < learned_.size(); ++k) seen_[var_of(learned_[k])] = 0;

    uint32_t back_level = 0;
    size_t watch_pos = 1;
    for (size_t k = 1; k < learned_.size(); ++k) {
      const uint32_t lvl = level_[var_of(learned_[k])];
      if (lvl > back_level) {
        back_level = lvl;
        watch_pos = k;
      }
    }

    // Backjump, then assert the learned literal.
    unassign_to(trail_lim_[back_level]);
    trail_lim_.resize(back_level);
    cursor_ = 1;

    if (learned_.size() == 1) {
      assign(learned_[0], -1);
      return;
    }
    std::swap(learned_[1], learned_[watch_pos]);
    Clause cl;
    cl.lits = learned_;
    const auto idx = static_cast<uint32_t>(clauses_.size());
    clauses_.push_back(std::move(cl));
    attach(idx);
    assign(learned_[0], static_cast<int32_t>(idx));
  }

  struct Frame {
    int32_t decision;
    bool flipped;
    size_t trail_size;
    uint32_t cursor;
  };

  uint32_t nvars_;
  SolverConfig config_;
  std::vector<Clause> clauses_;
  std::vector<int32_t> initial_units_;
  std::vector<int8_t> val_;
  std::vector<uint32_t> level_;
  std::vector<int32_t> reason_;
  std::vector<uint8_t> seen_;
  std::vector<std::vector<uint32_t>> watches_;
  std::vector<int32_t> trail_;
  std::vector<size_t> trail_lim_;
  std::vector<Frame> frames_;
  std::vector<int32_t> learned_;
  size_t qhead_ = 0;
  uint32_t cursor_ = 1;
  SolverStats stats_;
  Clock::time_point start_time_;
};

}  // namespace

SolveResult solve(const CnfInstance& cnf, const SolverConfig& config) {
  Search search(cnf, config);
  return search.run();
}

bool satisfies(const CnfInstance& cnf, const TruthAssignment& assignment) {
  if (assignment.var_count() != cnf.var_count()) return false;
  for (size_t c = 0; c < cnf.clause_count(); ++c) {
    bool ok = false;
    for (int32_t lit : cnf.clause(c)) {
      const uint32_t v = static_cast<uint32_t>(lit < 0 ? -lit : lit);
      if (assignment.value(v) == (lit > 0)) {
        ok = true;
        break;
      }
    }
    if (!ok) return false;
  }
  return true;
}

namespace {

std::string run_command_capture(const std::string& command) {
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) throw BridgeError("cannot start: " + command);
  std::string output;
  char buf[4096];
  size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) output.append(buf, got);
  pclose(pipe);  // exit codes are ignored; the status line decides
  return output;
}

class TempFile {
 public:
  explicit TempFile(const std::string& stem) {
    static std::atomic<uint64_t> counter{0};
    auto dir = std::filesystem::temp_directory_path();
    std::random_device rd;
    path_ = (dir / (stem + "-" + std::to_string(::getpid()) + "-" +
                    std::to_string(counter.fetch_add(1)) + "-" + std::to_string(rd()) + ".cnf"))
                .string();
  }
  ~TempFile() {
    std::error_code ec;
    std::filesystem::remove(path_, ec);
  }
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace

SolveResult solve_external(const CnfInstance& cnf, const std::string& command,
                           double timeout_seconds) {
  if (command.empty()) throw BridgeError("no solver command configured");
  const auto start = Clock::now();

  TempFile tmp("ncs-dimacs");
  write_text_file(tmp.path(), write_dimacs(cnf));

  std::string invocation;
  if (timeout_seconds > 0) {
    invocation = "timeout " + std::to_string(timeout_seconds) + " ";
  }
  invocation += command + " '" + tmp.path() + "'";
  const std::string output = run_command_capture(invocation);

  ParsedSolverOutput parsed;
  try {
    parsed = parse_solver_output(output, cnf.var_count());
  } catch (const ParseError& e) {
    if (timeout_seconds > 0 && output.empty()) {
      // A killed solver produces nothing; report the budget, not a bridge fault.
      SolveResult result;
      result.status = SolveStatus::budget_exceeded;
      result.stats.wall_ms =
          std::chrono::duration<double, std::milli>(Clock::now() - start).count();
      return result;
    }
    throw BridgeError(std::string("unparsable solver output: ") + e.what());
  }

  SolveResult result;
  result.stats.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  switch (parsed.status) {
    case ExternalStatus::unknown:
      result.status = SolveStatus::budget_exceeded;
      return result;
    case ExternalStatus::unsat:
      result.status = SolveStatus::unsat;
      return result;
    case ExternalStatus::sat:
      if (!satisfies(cnf, parsed.assignment)) {
        throw BridgeError("external solver answer fails clause verification");
      }
      result.status = SolveStatus::sat;
      result.assignment = std::move(parsed.assignment);
      return result;
  }
  throw BridgeError("unreachable solver status");
}

}  // namespace ncs
