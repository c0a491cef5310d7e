#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ncs/core.hpp"

namespace ncs {

// Variable layout for the CNF translation of a learning set.
//
// One boolean per (criterion, frontier, reference value) states "this value
// reaches the frontier's threshold on this criterion"; one boolean per
// coalition states "this coalition is sufficient". Threshold variables come
// first, ordered by (criterion, frontier, value rank); coalition variables
// follow, ordered by mask.
class Vocabulary {
 public:
  static Vocabulary build(const LearningSet& data);

  const CriteriaSpec& criteria() const { return criteria_; }
  int classes() const { return classes_; }
  int frontier_count() const { return classes_ - 1; }
  int criteria_count() const { return criteria_.count(); }

  const std::vector<Value>& values(int i) const { return values_[static_cast<size_t>(i)]; }
  // Exact rank of a reference value; throws if the value is not referenced.
  int rank_of(int i, Value v) const;

  uint32_t x_var(int criterion, int frontier, int rank) const;
  uint32_t y_var(uint32_t mask) const;

  uint32_t x_var_count() const { return y_base_ - 1; }
  uint32_t y_var_count() const { return uint32_t{1} << criteria_.count(); }
  uint32_t var_count() const { return x_var_count() + y_var_count(); }

  bool is_x_var(uint32_t id) const { return id >= 1 && id < y_base_; }
  struct ThresholdMeta {
    int criterion;
    int frontier;
    int rank;
  };
  ThresholdMeta x_meta(uint32_t id) const;
  uint32_t y_mask(uint32_t id) const;

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  Vocabulary(CriteriaSpec criteria, int classes, std::vector<std::vector<Value>> values);

  CriteriaSpec criteria_;
  int classes_;
  std::vector<std::vector<Value>> values_;  // sorted distinct reference values per criterion
  std::vector<uint32_t> x_base_;            // first id of each criterion's threshold block
  uint32_t y_base_;
};

// Why a clause exists. Families are emitted in this order.
enum class ClauseFamily {
  scale_order = 0,        // higher value passes whenever a lower one does
  frontier_order,         // passing a higher frontier implies passing lower ones
  coalition_order,        // supersets of sufficient coalitions are sufficient
  upper_frontier_veto,    // coalitions favorable at the frontier above an alternative's class are insufficient
  lower_frontier_support  // weak criteria at the frontier below force the complement to be sufficient
};

struct FamilyCounts {
  uint64_t scale_order = 0;
  uint64_t frontier_order = 0;
  uint64_t coalition_order = 0;
  uint64_t upper_frontier_veto = 0;
  uint64_t lower_frontier_support = 0;

  uint64_t total() const {
    return scale_order + frontier_order + coalition_order + upper_frontier_veto +
           lower_frontier_support;
  }
  friend bool operator==(const FamilyCounts&, const FamilyCounts&) = default;
};

// A CNF in signed-integer literal form. Clauses are non-empty, contain no
// complementary pair, and reference variables in [1..var_count].
class CnfInstance {
 public:
  explicit CnfInstance(uint32_t var_count) : var_count_(var_count) { starts_.push_back(0); }

  void add_clause(std::span<const int32_t> lits);

  uint32_t var_count() const { return var_count_; }
  size_t clause_count() const { return starts_.size() - 1; }
  std::span<const int32_t> clause(size_t idx) const {
    return {lits_.data() + starts_[idx], starts_[idx + 1] - starts_[idx]};
  }

  const FamilyCounts& family_counts() const { return families_; }
  const std::optional<Vocabulary>& vocabulary() const { return vocabulary_; }
  // Pairs of alternative ids sharing a profile but not a class. Such data is
  // never representable and the instance is guaranteed unsatisfiable.
  const std::vector<std::pair<std::string, std::string>>& conflicting_duplicates() const {
    return conflicts_;
  }

 private:
  friend CnfInstance encode(const LearningSet&, bool);

  uint32_t var_count_;
  std::vector<int32_t> lits_;
  std::vector<size_t> starts_;
  FamilyCounts families_;
  std::optional<Vocabulary> vocabulary_;
  std::vector<std::pair<std::string, std::string>> conflicts_;

  void validate_clause(std::span<const int32_t> lits) const;
};

// Total truth assignment over variables 1..var_count.
class TruthAssignment {
 public:
  TruthAssignment() = default;
  explicit TruthAssignment(uint32_t var_count) : vals_(var_count, 0) {}

  uint32_t var_count() const { return static_cast<uint32_t>(vals_.size()); }
  bool value(uint32_t var) const { return vals_[var - 1] != 0; }
  void set(uint32_t var, bool v) { vals_[var - 1] = v ? 1 : 0; }

  friend bool operator==(const TruthAssignment&, const TruthAssignment&) = default;

 private:
  std::vector<uint8_t> vals_;
};

Vocabulary build_vocabulary(const LearningSet& data);

// CNF translation of the learning set. Satisfiable exactly when some model
// with nested frontiers and one upward-closed coalition family reproduces
// every recorded class. Exact duplicates are collapsed before emission.
CnfInstance encode(const LearningSet& data, bool parallel = true);

// Reads a model off a satisfying assignment: each threshold becomes the
// smallest reference value marked as passing (or the top sentinel when none
// is), and the sufficient family is the set of marked coalitions.
UncsModel decode(const Vocabulary& vocab, const TruthAssignment& assignment);

// The assignment a conforming model induces on the vocabulary: a threshold
// variable is true iff its value reaches the model's frontier entry, and a
// coalition variable is true iff the coalition is sufficient.
TruthAssignment model_image(const UncsModel& model, const Vocabulary& vocab);

// DIMACS CNF text: `p cnf <vars> <clauses>` first, vocabulary mapping as
// comment lines, then one zero-terminated clause per line.
std::string write_dimacs(const CnfInstance& cnf);
CnfInstance read_dimacs(std::string_view text);

// Variable id -> semantic tuple, as a JSON object.
std::string vocabulary_json(const Vocabulary& vocab);

enum class ExternalStatus { sat, unsat, unknown };

struct ParsedSolverOutput {
  ExternalStatus status;
  TruthAssignment assignment;  // meaningful only when sat; unlisted vars are false
};

// Parses SAT-competition style output: an `s` status line, then `v` literal
// lines terminated by 0 when satisfiable.
ParsedSolverOutput parse_solver_output(std::string_view text, uint32_t var_count);

}  // namespace ncs
