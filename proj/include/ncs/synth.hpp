#pragma once

#include <cstdint>

#include "ncs/core.hpp"
#include "ncs/rng.hpp"

namespace ncs {

struct GenConfig {
  int n_criteria = 4;
  int n_classes = 2;
  int n_alternatives = 16;
  uint64_t seed = 0;
};

// Random additive ground truth: per criterion the frontier entries are
// sorted uniforms on [0,1]; the weights are consecutive differences of
// sorted uniforms padded with 0 and 1 (so they sum to exactly one); the
// threshold is uniform on the open interval (0.5, 1). Criteria are named
// c1..cN, all ascending.
//
// Draw order is fixed: frontiers criterion by criterion, then the weight
// cut points, then the threshold.
MrSortModel gen_mrsort(const GenConfig& cfg, Rng& rng);

// Profiles drawn i.i.d. uniformly on [0,1]^N and labeled by the model;
// identifiers a1..aN.
LearningSet gen_learning_set(const MrSortModel& model, int count, Rng& rng);

struct Instance {
  MrSortModel truth;
  LearningSet data;
};

// One seeded trial: the model stream is derive_seed(cfg.seed, 0), the data
// stream derive_seed(cfg.seed, 1).
Instance gen_instance(const GenConfig& cfg);

}  // namespace ncs
