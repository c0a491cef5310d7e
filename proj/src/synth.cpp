#include "ncs/synth.hpp"

#include <algorithm>

#include "ncs/errors.hpp"

namespace ncs {

namespace {

void check_config(const GenConfig& cfg) {
  if (cfg.n_criteria < 1) throw InputError("need at least one criterion");
  if (cfg.n_classes < 2) throw InputError("need at least two classes");
  if (cfg.n_alternatives < 0) throw InputError("negative alternative count");
}

CriteriaSpec default_criteria(int n) {
  std::vector<Criterion> criteria;
  for (int i = 1; i <= n; ++i) criteria.push_back({"c" + std::to_string(i), Direction::maximize});
  return CriteriaSpec(std::move(criteria));
}

}  // namespace

MrSortModel gen_mrsort(const GenConfig& cfg, Rng& rng) {
  check_config(cfg);
  const int n = cfg.n_criteria;
  const int p = cfg.n_classes;

  std::vector<Profile> frontiers(static_cast<size_t>(p - 1), Profile(static_cast<size_t>(n)));
  std::vector<Value> column(static_cast<size_t>(p - 1));
  for (int i = 0; i < n; ++i) {
    for (auto& v : column) v = rng.unit_value();
    std::sort(column.begin(), column.end());
    for (int h = 0; h < p - 1; ++h) {
      frontiers[static_cast<size_t>(h)][static_cast<size_t>(i)] = column[static_cast<size_t>(h)];
    }
  }

  // Sorted cut points of [0,1] turned into weights by differencing; the
  // telescoping sum is exactly one in fixed-point units.
  std::vector<int64_t> cuts;
  cuts.reserve(static_cast<size_t>(n) + 1);
  cuts.push_back(0);
  for (int i = 0; i < n - 1; ++i) cuts.push_back(rng.unit_value().units());
  cuts.push_back(Value::kScale);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Value> weights;
  weights.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    weights.push_back(Value::from_units(cuts[static_cast<size_t>(i) + 1] - cuts[static_cast<size_t>(i)]));
  }

  // Uniform over the open interval (0.5, 1): both endpoints excluded.
  const int64_t half = Value::kScale / 2;
  const auto lambda_units =
      half + 1 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(half - 1)));
  const Value lambda = Value::from_units(lambda_units);

  return MrSortModel(default_criteria(n), p, std::move(frontiers), std::move(weights), lambda);
}

LearningSet gen_learning_set(const MrSortModel& model, int count, Rng& rng) {
  if (count < 0) throw InputError("negative alternative count");
  const int n = model.criteria().count();
  const UncsModel sorter = model.to_uncs();

  std::vector<Alternative> alts;
  alts.reserve(static_cast<size_t>(count));
  for (int j = 1; j <= count; ++j) {
    Alternative alt;
    alt.id = "a" + std::to_string(j);
    alt.profile.reserve(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) alt.profile.push_back(rng.unit_value());
    alt.label = assign(sorter, alt.profile);
    alts.push_back(std::move(alt));
  }
  return LearningSet(model.criteria(), model.classes(), std::move(alts));
}

Instance gen_instance(const GenConfig& cfg) {
  check_config(cfg);
  Rng model_rng(derive_seed(cfg.seed, 0));
  MrSortModel truth = gen_mrsort(cfg, model_rng);
  Rng data_rng(derive_seed(cfg.seed, 1));
  LearningSet data = gen_learning_set(truth, cfg.n_alternatives, data_rng);
  return {std::move(truth), std::move(data)};
}

}  // namespace ncs
