#pragma once

#include <cstdint>
#include <optional>

#include "ncs/core.hpp"

namespace ncs {

// Evaluation sample count by criteria count: max(min(4^n, 3e5), 1e4).
int64_t default_sample_size(int n_criteria);

// Fraction of uniformly drawn profiles on [0,1]^N that the two models sort
// into different classes. Sample j is generated from its own counter-derived
// stream, so the result is identical for the serial and the parallel path
// and for any thread count.
double err_rate(const UncsModel& a, const UncsModel& b, int64_t samples, uint64_t seed,
                bool parallel = true);

// Exhaustive representability check for tiny instances: enumerates every
// upward-closed coalition family and every nested tuple of thresholds drawn
// from the reference values plus the top sentinel, and returns the first
// model that extends the data. Refuses instances above its size guard.
std::optional<UncsModel> brute_force_representable(const LearningSet& data);

// All upward-closed families over n criteria (3, 6, 20, 168 for n = 1..4).
std::vector<UpSet> enumerate_upsets(int n_criteria);

}  // namespace ncs
