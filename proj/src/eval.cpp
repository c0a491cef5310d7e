#include "ncs/eval.hpp"

#include <algorithm>
#include <bit>

#include "ncs/errors.hpp"
#include "ncs/rng.hpp"

namespace ncs {

int64_t default_sample_size(int n_criteria) {
  if (n_criteria < 1) throw InputError("need at least one criterion");
  int64_t pow4 = 1;
  for (int i = 0; i < n_criteria && pow4 < 300'000; ++i) pow4 *= 4;
  return std::max<int64_t>(std::min<int64_t>(pow4, 300'000), 10'000);
}

double err_rate(const UncsModel& a, const UncsModel& b, int64_t samples, uint64_t seed,
                bool parallel) {
  if (a.criteria() != b.criteria() || a.classes() != b.classes()) {
    throw InputError("models disagree on criteria or class count");
  }
  if (samples < 1) throw InputError("need at least one sample");
  const int n = a.criteria().count();

  int64_t errors = 0;
#pragma omp parallel for schedule(static) reduction(+ : errors) if (parallel)
  for (int64_t j = 0; j < samples; ++j) {
    Rng rng(derive_seed(seed, static_cast<uint64_t>(j)));
    Value x[32];
    for (int i = 0; i < n; ++i) x[i] = rng.unit_value();
    const std::span<const Value> profile(x, static_cast<size_t>(n));
    if (assign(a, profile) != assign(b, profile)) ++errors;
  }
  return static_cast<double>(errors) / static_cast<double>(samples);
}

std::vector<UpSet> enumerate_upsets(int n_criteria) {
  if (n_criteria < 1 || n_criteria > 4) {
    throw SizeGuardError("coalition-family enumeration is limited to 4 criteria");
  }
  const uint32_t n_masks = 1u << n_criteria;

  // Masks in descending cardinality: every superset of a mask is decided
  // before the mask itself, so "member only if every one-bigger coalition is
  // a member" is exactly upward closure.
  std::vector<uint32_t> order(n_masks);
  for (uint32_t m = 0; m < n_masks; ++m) order[m] = m;
  std::stable_sort(order.begin(), order.end(), [](uint32_t a, uint32_t b) {
    return std::popcount(a) > std::popcount(b);
  });

  std::vector<UpSet> out;
  std::vector<uint8_t> table(n_masks, 0);
  auto recurse = [&](auto&& self, size_t step) -> void {
    if (step == order.size()) {
      out.emplace_back(n_criteria, table);
      return;
    }
    const uint32_t mask = order[step];
    bool can_join = true;
    for (int i = 0; i < n_criteria && can_join; ++i) {
      const uint32_t super = mask | (1u << i);
      if (super != mask && !table[super]) can_join = false;
    }
    if (can_join) {
      table[mask] = 1;
      self(self, step + 1);
      table[mask] = 0;
    }
    self(self, step + 1);
  };
  recurse(recurse, 0);
  return out;
}

namespace {

// Nondecreasing (p-1)-tuples of candidate indices, lexicographic.
std::vector<std::vector<int>> nondecreasing_tuples(int n_candidates, int length) {
  std::vector<std::vector<int>> out;
  std::vector<int> current(static_cast<size_t>(length), 0);
  auto recurse = [&](auto&& self, int pos, int low) -> void {
    if (pos == length) {
      out.push_back(current);
      return;
    }
    for (int c = low; c < n_candidates; ++c) {
      current[static_cast<size_t>(pos)] = c;
      self(self, pos + 1, c);
    }
  };
  recurse(recurse, 0, 0);
  return out;
}

}  // namespace

std::optional<UncsModel> brute_force_representable(const LearningSet& data) {
  const int n = data.criteria().count();
  const int p = data.classes();
  if (n > 4) throw SizeGuardError("exhaustive search is limited to 4 criteria");

  // Candidate thresholds per criterion: the reference values plus a sentinel
  // above all of them.
  std::vector<std::vector<Value>> candidates(static_cast<size_t>(n));
  for (const auto& alt : data.alternatives()) {
    for (int i = 0; i < n; ++i) candidates[static_cast<size_t>(i)].push_back(alt.profile[static_cast<size_t>(i)]);
  }
  for (auto& column : candidates) {
    std::sort(column.begin(), column.end());
    column.erase(std::unique(column.begin(), column.end()), column.end());
    column.push_back(Value::above_all());
  }

  std::vector<std::vector<std::vector<int>>> tuples;
  double combos = 1.0;
  for (int i = 0; i < n; ++i) {
    tuples.push_back(nondecreasing_tuples(static_cast<int>(candidates[static_cast<size_t>(i)].size()), p - 1));
    combos *= static_cast<double>(tuples.back().size());
  }
  const auto upsets = enumerate_upsets(n);
  const double work = combos * static_cast<double>(upsets.size()) *
                      static_cast<double>(std::max<size_t>(data.size(), 1));
  if (work > 5e8) throw SizeGuardError("instance too large for exhaustive search");

  const size_t n_alts = data.size();
  std::vector<uint32_t> favorable(n_alts * static_cast<size_t>(p - 1));
  std::vector<size_t> odometer(static_cast<size_t>(n), 0);
  std::vector<Profile> frontiers(static_cast<size_t>(p - 1), Profile(static_cast<size_t>(n)));

  for (;;) {
    for (int h = 0; h < p - 1; ++h) {
      for (int i = 0; i < n; ++i) {
        const auto& tuple = tuples[static_cast<size_t>(i)][odometer[static_cast<size_t>(i)]];
        frontiers[static_cast<size_t>(h)][static_cast<size_t>(i)] =
            candidates[static_cast<size_t>(i)][static_cast<size_t>(tuple[static_cast<size_t>(h)])];
      }
    }
    for (size_t a = 0; a < n_alts; ++a) {
      const auto& profile = data.alternatives()[a].profile;
      for (int h = 0; h < p - 1; ++h) {
        favorable[a * static_cast<size_t>(p - 1) + static_cast<size_t>(h)] =
            favorable_coalition(profile, frontiers[static_cast<size_t>(h)]).mask;
      }
    }
    for (const auto& upset : upsets) {
      bool ok = true;
      for (size_t a = 0; a < n_alts && ok; ++a) {
        int cls = 1;
        for (int h = 0; h < p - 1; ++h) {
          if (upset.contains({favorable[a * static_cast<size_t>(p - 1) + static_cast<size_t>(h)]})) ++cls;
        }
        ok = cls == data.alternatives()[a].label;
      }
      if (ok) return UncsModel(data.criteria(), p, frontiers, upset);
    }

    int pos = n - 1;
    while (pos >= 0 && ++odometer[static_cast<size_t>(pos)] == tuples[static_cast<size_t>(pos)].size()) {
      odometer[static_cast<size_t>(pos)] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
  return std::nullopt;
}

}  // namespace ncs
