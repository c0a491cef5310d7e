#include "ncs/core.hpp"

#include <algorithm>
#include <unordered_set>

#include "ncs/errors.hpp"

namespace ncs {

namespace {

constexpr int kMaxCriteria = 16;  // coalition tables are dense in 2^n

void check_criteria_count(int n) {
  if (n < 1) throw InputError("at least one criterion is required");
  if (n > kMaxCriteria) {
    throw InputError("criteria count " + std::to_string(n) + " exceeds the supported limit of " +
                     std::to_string(kMaxCriteria));
  }
}

void check_profile(const CriteriaSpec& spec, const Profile& p, const std::string& what) {
  if (static_cast<int>(p.size()) != spec.count()) {
    throw InputError(what + ": profile has " + std::to_string(p.size()) + " values, expected " +
                     std::to_string(spec.count()));
  }
}

}  // namespace

CriteriaSpec::CriteriaSpec(std::vector<Criterion> criteria) : criteria_(std::move(criteria)) {
  check_criteria_count(static_cast<int>(criteria_.size()));
  std::unordered_set<std::string> names;
  for (const auto& c : criteria_) {
    if (c.name.empty()) throw InputError("criterion names must be non-empty");
    if (!names.insert(c.name).second) {
      throw InputError("duplicate criterion name: " + c.name);
    }
  }
}

int CriteriaSpec::index_of(std::string_view name) const {
  for (size_t i = 0; i < criteria_.size(); ++i) {
    if (criteria_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

UpSet::UpSet(int n_criteria, std::vector<uint8_t> member_table)
    : n_(n_criteria), table_(std::move(member_table)) {
  check_criteria_count(n_);
  const size_t expected = size_t{1} << n_;
  if (table_.size() != expected) {
    throw InputError("coalition table has " + std::to_string(table_.size()) + " entries, expected " +
                     std::to_string(expected));
  }
  for (uint32_t mask = 0; mask < expected; ++mask) {
    if (!table_[mask]) continue;
    for (int i = 0; i < n_; ++i) {
      const uint32_t super = mask | (1u << i);
      if (!table_[super]) {
        throw InputError("coalition family is not upward closed at mask " + std::to_string(mask));
      }
    }
  }
}

UpSet UpSet::none(int n_criteria) {
  check_criteria_count(n_criteria);
  return UpSet(n_criteria, std::vector<uint8_t>(size_t{1} << n_criteria, 0));
}

UpSet UpSet::all(int n_criteria) {
  check_criteria_count(n_criteria);
  return UpSet(n_criteria, std::vector<uint8_t>(size_t{1} << n_criteria, 1));
}

UpSet UpSet::from_minimal(int n_criteria, std::span<const uint32_t> minimal) {
  check_criteria_count(n_criteria);
  const size_t size = size_t{1} << n_criteria;
  std::vector<uint8_t> table(size, 0);
  for (uint32_t m : minimal) {
    if (m >= size) throw InputError("coalition mask " + std::to_string(m) + " out of range");
    table[m] = 1;
  }
  // Upward closure, one bit dimension at a time.
  for (int i = 0; i < n_criteria; ++i) {
    const uint32_t bit = 1u << i;
    for (uint32_t mask = 0; mask < size; ++mask) {
      if (table[mask]) table[mask | bit] = 1;
    }
  }
  return UpSet(n_criteria, std::move(table));
}

std::vector<uint32_t> UpSet::minimal_members() const {
  std::vector<uint32_t> out;
  const uint32_t size = 1u << n_;
  for (uint32_t mask = 0; mask < size; ++mask) {
    if (!table_[mask]) continue;
    bool minimal = true;
    for (int i = 0; i < n_ && minimal; ++i) {
      const uint32_t bit = 1u << i;
      if ((mask & bit) && table_[mask ^ bit]) minimal = false;
    }
    if (minimal) out.push_back(mask);
  }
  return out;
}

namespace {

void check_frontiers(const CriteriaSpec& criteria, int classes,
                     const std::vector<Profile>& frontiers) {
  if (classes < 2) throw InputError("at least two classes are required");
  if (static_cast<int>(frontiers.size()) != classes - 1) {
    throw InputError("expected " + std::to_string(classes - 1) + " frontiers, got " +
                     std::to_string(frontiers.size()));
  }
  for (const auto& f : frontiers) check_profile(criteria, f, "frontier");
  for (size_t h = 1; h < frontiers.size(); ++h) {
    for (int i = 0; i < criteria.count(); ++i) {
      // The sentinel is the maximum of the scale, so plain comparison nests it.
      if (frontiers[h - 1][static_cast<size_t>(i)] > frontiers[h][static_cast<size_t>(i)]) {
        throw InputError("frontiers are not nested on criterion " + criteria.at(i).name);
      }
    }
  }
}

}  // namespace

UncsModel::UncsModel(CriteriaSpec criteria, int classes, std::vector<Profile> frontiers,
                     UpSet sufficient)
    : criteria_(std::move(criteria)),
      classes_(classes),
      frontiers_(std::move(frontiers)),
      sufficient_(std::move(sufficient)) {
  check_frontiers(criteria_, classes_, frontiers_);
  if (sufficient_.criteria_count() != criteria_.count()) {
    throw InputError("sufficient-coalition family is over " +
                     std::to_string(sufficient_.criteria_count()) + " criteria, model has " +
                     std::to_string(criteria_.count()));
  }
}

MrSortModel::MrSortModel(CriteriaSpec criteria, int classes, std::vector<Profile> frontiers,
                         std::vector<Value> weights, Value lambda)
    : criteria_(std::move(criteria)),
      classes_(classes),
      frontiers_(std::move(frontiers)),
      weights_(std::move(weights)),
      lambda_(lambda) {
  check_frontiers(criteria_, classes_, frontiers_);
  if (static_cast<int>(weights_.size()) != criteria_.count()) {
    throw InputError("expected one weight per criterion");
  }
  for (const Value w : weights_) {
    if (w.is_above_all() || w.units() < 0) throw InputError("weights must be non-negative");
  }
  if (lambda_.is_above_all() || lambda_.units() < 0) {
    throw InputError("the qualification threshold must be non-negative");
  }
}

UncsModel MrSortModel::to_uncs() const {
  return UncsModel(criteria_, classes_, frontiers_, mr_upset(weights_, lambda_));
}

LearningSet::LearningSet(CriteriaSpec criteria, int classes, std::vector<Alternative> alternatives)
    : criteria_(std::move(criteria)), classes_(classes), alternatives_(std::move(alternatives)) {
  if (classes_ < 2) throw InputError("at least two classes are required");
  std::unordered_set<std::string> ids;
  for (const auto& alt : alternatives_) {
    if (alt.id.empty()) throw InputError("alternative identifiers must be non-empty");
    if (!ids.insert(alt.id).second) throw InputError("duplicate alternative identifier: " + alt.id);
    check_profile(criteria_, alt.profile, "alternative " + alt.id);
    for (const Value v : alt.profile) {
      if (v.is_above_all()) throw InputError("alternative " + alt.id + " has a non-finite value");
    }
    if (alt.label < 1 || alt.label > classes_) {
      throw InputError("alternative " + alt.id + " has class " + std::to_string(alt.label) +
                       " outside [1.." + std::to_string(classes_) + "]");
    }
  }
}

bool LearningSet::values_in_unit_range() const {
  for (const auto& alt : alternatives_) {
    for (const Value v : alt.profile) {
      if (v.units() < 0 || v.units() > Value::kScale) return false;
    }
  }
  return true;
}

Coalition favorable_coalition(std::span<const Value> x, std::span<const Value> b) {
  if (x.size() != b.size()) {
    throw InputError("profiles have different lengths: " + std::to_string(x.size()) + " vs " +
                     std::to_string(b.size()));
  }
  Coalition c;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!b[i].is_above_all() && x[i] >= b[i]) c.mask |= (1u << i);
  }
  return c;
}

bool dominates(std::span<const Value> x, std::span<const Value> y) {
  return favorable_coalition(x, y) == Coalition::full(static_cast<int>(x.size()));
}

int assign(const UncsModel& model, std::span<const Value> x) {
  if (static_cast<int>(x.size()) != model.criteria().count()) {
    throw InputError("profile does not conform to the model's criteria");
  }
  int passed = 0;
  for (const auto& frontier : model.frontiers()) {
    if (model.sufficient().contains(favorable_coalition(x, frontier))) ++passed;
  }
  return 1 + passed;
}

UpSet mr_upset(std::span<const Value> weights, Value lambda) {
  const int n = static_cast<int>(weights.size());
  check_criteria_count(n);
  for (const Value w : weights) {
    if (w.is_above_all() || w.units() < 0) throw InputError("weights must be non-negative");
  }
  if (lambda.is_above_all() || lambda.units() < 0) {
    throw InputError("the qualification threshold must be non-negative");
  }
  const size_t size = size_t{1} << n;
  std::vector<uint8_t> table(size, 0);
  for (uint32_t mask = 0; mask < size; ++mask) {
    __int128 sum = 0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) sum += weights[static_cast<size_t>(i)].units();
    }
    table[mask] = sum >= lambda.units() ? 1 : 0;
  }
  return UpSet(n, std::move(table));
}

std::vector<Violation> extends(const UncsModel& model, const LearningSet& data) {
  if (model.criteria() != data.criteria() || model.classes() != data.classes()) {
    throw InputError("model and learning set disagree on criteria or class count");
  }
  std::vector<Violation> out;
  for (const auto& alt : data.alternatives()) {
    const int computed = assign(model, alt.profile);
    if (computed != alt.label) out.push_back({alt.id, alt.label, computed});
  }
  return out;
}

}  // namespace ncs
