#pragma once

#include <bit>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ncs/value.hpp"

namespace ncs {

enum class Direction { maximize, minimize };

struct Criterion {
  std::string name;
  Direction direction = Direction::maximize;
  friend bool operator==(const Criterion&, const Criterion&) = default;
};

// The set of criteria an instance is described on. All values handled by the
// library are stored in the "more is better" orientation: columns of
// minimize-direction criteria are negated at ingestion and restored on
// output, so internal comparisons never branch on direction.
class CriteriaSpec {
 public:
  explicit CriteriaSpec(std::vector<Criterion> criteria);

  int count() const { return static_cast<int>(criteria_.size()); }
  const Criterion& at(int i) const { return criteria_[static_cast<size_t>(i)]; }
  const std::vector<Criterion>& list() const { return criteria_; }

  // -1 when absent.
  int index_of(std::string_view name) const;

  friend bool operator==(const CriteriaSpec&, const CriteriaSpec&) = default;

 private:
  std::vector<Criterion> criteria_;
};

// One value per criterion; describes an alternative or a class frontier.
using Profile = std::vector<Value>;

// A subset of criteria, by analogy with voters.
struct Coalition {
  uint32_t mask = 0;

  bool contains(int i) const { return (mask >> i) & 1u; }
  int size() const { return std::popcount(mask); }
  static Coalition full(int n) { return {(n >= 32) ? ~0u : ((1u << n) - 1u)}; }

  friend bool operator==(Coalition, Coalition) = default;
};

// An upward-closed family of coalitions, stored as a membership table over
// all 2^n masks. Construction validates closure.
class UpSet {
 public:
  UpSet(int n_criteria, std::vector<uint8_t> member_table);

  static UpSet none(int n_criteria);
  static UpSet all(int n_criteria);
  static UpSet from_minimal(int n_criteria, std::span<const uint32_t> minimal);

  int criteria_count() const { return n_; }
  size_t table_size() const { return table_.size(); }
  bool contains(Coalition b) const { return table_[b.mask] != 0; }

  // The antichain of members with no member strictly below them, ascending.
  std::vector<uint32_t> minimal_members() const;

  friend bool operator==(const UpSet&, const UpSet&) = default;

 private:
  int n_;
  std::vector<uint8_t> table_;
};

// Sorting model with nested frontier profiles and one family of sufficient
// coalitions shared by every frontier. Frontier h (1-based) separates class
// h (below) from class h+1 (above).
class UncsModel {
 public:
  UncsModel(CriteriaSpec criteria, int classes, std::vector<Profile> frontiers,
            UpSet sufficient);

  const CriteriaSpec& criteria() const { return criteria_; }
  int classes() const { return classes_; }
  const std::vector<Profile>& frontiers() const { return frontiers_; }
  const Profile& frontier(int h) const { return frontiers_[static_cast<size_t>(h - 1)]; }
  const UpSet& sufficient() const { return sufficient_; }

 private:
  CriteriaSpec criteria_;
  int classes_;
  std::vector<Profile> frontiers_;
  UpSet sufficient_;
};

// The additive special case: a coalition is sufficient when its combined
// voting power reaches the threshold.
class MrSortModel {
 public:
  MrSortModel(CriteriaSpec criteria, int classes, std::vector<Profile> frontiers,
              std::vector<Value> weights, Value lambda);

  const CriteriaSpec& criteria() const { return criteria_; }
  int classes() const { return classes_; }
  const std::vector<Profile>& frontiers() const { return frontiers_; }
  const Profile& frontier(int h) const { return frontiers_[static_cast<size_t>(h - 1)]; }
  const std::vector<Value>& weights() const { return weights_; }
  Value lambda() const { return lambda_; }

  UncsModel to_uncs() const;

 private:
  CriteriaSpec criteria_;
  int classes_;
  std::vector<Profile> frontiers_;
  std::vector<Value> weights_;
  Value lambda_;
};

struct Alternative {
  std::string id;
  Profile profile;
  int label = 1;  // assigned class, 1-based
};

// Reference alternatives with their recorded classes.
class LearningSet {
 public:
  LearningSet(CriteriaSpec criteria, int classes, std::vector<Alternative> alternatives);

  const CriteriaSpec& criteria() const { return criteria_; }
  int classes() const { return classes_; }
  const std::vector<Alternative>& alternatives() const { return alternatives_; }
  size_t size() const { return alternatives_.size(); }
  bool values_in_unit_range() const;

 private:
  CriteriaSpec criteria_;
  int classes_;
  std::vector<Alternative> alternatives_;
};

// Criteria on which x is at least as good as b. Frontier entries equal to
// the top sentinel are never matched.
Coalition favorable_coalition(std::span<const Value> x, std::span<const Value> b);

// Weak Pareto dominance: at least as good on every criterion.
bool dominates(std::span<const Value> x, std::span<const Value> y);

// Class index in [1..p]: one plus the number of frontiers whose favorable
// coalition is sufficient. Nesting and upward closure make that set a prefix.
int assign(const UncsModel& model, std::span<const Value> x);

// The upset induced by voting weights and a qualification threshold.
UpSet mr_upset(std::span<const Value> weights, Value lambda);

struct Violation {
  std::string id;
  int expected = 0;
  int computed = 0;
  friend bool operator==(const Violation&, const Violation&) = default;
};

// Alternatives on which the model disagrees with the recorded class; empty
// means the model extends the assignment.
std::vector<Violation> extends(const UncsModel& model, const LearningSet& data);

}  // namespace ncs
