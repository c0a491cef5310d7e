#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ncs/errors.hpp"
#include "ncs/eval.hpp"
#include "ncs/io.hpp"
#include "ncs/sat.hpp"
#include "ncs/solver.hpp"
#include "ncs/synth.hpp"
#include "terry.hpp"

using namespace ncs;

TEST_CASE("generated ground truths obey the sampling protocol") {
  Rng rng(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const GenConfig cfg{1 + static_cast<int>(rng.bounded(8)), 2 + static_cast<int>(rng.bounded(4)),
                        0, rng.next()};
    Rng model_rng(cfg.seed);
    const auto model = gen_mrsort(cfg, model_rng);

    int64_t total = 0;
    for (const Value w : model.weights()) {
      CHECK(w.units() >= 0);
      total += w.units();
    }
    CHECK(total == Value::kScale);  // telescoping differences, exactly

    CHECK(model.lambda() > Value::parse("0.5"));
    CHECK(model.lambda() < Value::parse("1"));

    for (size_t h = 1; h < model.frontiers().size(); ++h) {
      for (int i = 0; i < cfg.n_criteria; ++i) {
        CHECK(model.frontiers()[h - 1][static_cast<size_t>(i)] <=
              model.frontiers()[h][static_cast<size_t>(i)]);
      }
    }
  }
}

TEST_CASE("identical seeds reproduce bit-identical artifacts") {
  const GenConfig cfg{5, 3, 24, 20240817};
  const auto a = gen_instance(cfg);
  const auto b = gen_instance(cfg);
  CHECK(write_model_json(a.truth) == write_model_json(b.truth));
  std::ostringstream csv_a, csv_b;
  write_learning_csv(a.data, csv_a);
  write_learning_csv(b.data, csv_b);
  CHECK(csv_a.str() == csv_b.str());
  CHECK(csv_a.str().find("a1,") != std::string::npos);
}

TEST_CASE("labels of generated sets come from the generating model") {
  const auto instance = gen_instance({4, 3, 64, 99});
  CHECK(extends(instance.truth.to_uncs(), instance.data).empty());
  for (const auto& alt : instance.data.alternatives()) {
    CHECK(alt.label >= 1);
    CHECK(alt.label <= 3);
  }
}

TEST_CASE("a single decisive criterion sorts by its column alone") {
  const CriteriaSpec spec({{"c1"}, {"c2"}, {"c3"}});
  const MrSortModel model(spec, 3,
                          {{Value::parse("0.3"), Value::parse("0.5"), Value::parse("0.9")},
                           {Value::parse("0.6"), Value::parse("0.7"), Value::parse("0.95")}},
                          {Value::parse("1"), Value::parse("0"), Value::parse("0")},
                          Value::parse("0.7"));
  Rng rng(3);
  const auto data = gen_learning_set(model, 200, rng);
  auto alts = data.alternatives();
  std::sort(alts.begin(), alts.end(),
            [](const Alternative& a, const Alternative& b) { return a.profile[0] < b.profile[0]; });
  for (size_t i = 1; i < alts.size(); ++i) {
    CHECK(alts[i - 1].label <= alts[i].label);  // monotone in the decisive column
  }
}

TEST_CASE("generated learning sets are always representable") {
  Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const GenConfig cfg{2 + static_cast<int>(rng.bounded(5)), 2 + static_cast<int>(rng.bounded(3)),
                        8 + static_cast<int>(rng.bounded(56)), rng.next()};
    const auto instance = gen_instance(cfg);
    CHECK(solve(encode(instance.data)).status == SolveStatus::sat);
  }
}

TEST_CASE("evaluation sample size follows the published size rule") {
  CHECK(default_sample_size(9) == 262'144);
  CHECK(default_sample_size(5) == 10'000);
  CHECK(default_sample_size(13) == 300'000);
  CHECK(default_sample_size(1) == 10'000);
  CHECK_THROWS_AS(default_sample_size(0), InputError);
}

TEST_CASE("disagreement of a model with itself and its scalings is zero") {
  const auto truth = gen_instance({4, 3, 1, 5}).truth;
  const auto a = truth.to_uncs();
  CHECK(err_rate(a, a, 20'000, 1) == 0.0);

  std::vector<Value> doubled;
  for (const Value w : truth.weights()) doubled.push_back(Value::from_units(2 * w.units()));
  const MrSortModel scaled(truth.criteria(), truth.classes(), truth.frontiers(), doubled,
                           Value::from_units(2 * truth.lambda().units()));
  CHECK(err_rate(a, scaled.to_uncs(), 20'000, 2) == 0.0);
}

TEST_CASE("disagreement estimates match the exact measure") {
  const CriteriaSpec one({{"a"}});
  const UpSet top = UpSet::from_minimal(1, std::vector<uint32_t>{1});
  const UncsModel at_03(one, 2, {{Value::parse("0.3")}}, top);
  const UncsModel at_05(one, 2, {{Value::parse("0.5")}}, top);
  // Disagreement is the mass of [0.3, 0.5); three standard errors at 1e4.
  const double se3 = 3 * std::sqrt(0.2 * 0.8 / 10'000.0);
  for (uint64_t seed : {11ull, 12ull, 13ull}) {
    CHECK(std::abs(err_rate(at_03, at_05, 10'000, seed) - 0.2) < se3);
  }
}

TEST_CASE("disagreement is symmetric given the seed") {
  const auto a = gen_instance({3, 3, 1, 21}).truth.to_uncs();
  const auto b = gen_instance({3, 3, 1, 22}).truth.to_uncs();
  CHECK(err_rate(a, b, 50'000, 7) == err_rate(b, a, 50'000, 7));
}

TEST_CASE("coalition-family enumeration hits the known counts") {
  CHECK(enumerate_upsets(1).size() == 3);
  CHECK(enumerate_upsets(2).size() == 6);
  CHECK(enumerate_upsets(3).size() == 20);
  CHECK(enumerate_upsets(4).size() == 168);
  CHECK_THROWS_AS(enumerate_upsets(5), SizeGuardError);
}

TEST_CASE("exhaustive search finds models exactly when they exist") {
  // A single alternative is always representable.
  const LearningSet single(CriteriaSpec({{"a"}, {"b"}}), 2,
                           {{"x", {Value::parse("0.4"), Value::parse("0.6")}, 2}});
  const auto found = brute_force_representable(single);
  REQUIRE(found.has_value());
  CHECK(extends(*found, single).empty());

  // The dominance-violating pair is not.
  const LearningSet broken(CriteriaSpec({{"a"}}), 2,
                           {{"lo", {Value::parse("0.2")}, 2}, {"hi", {Value::parse("0.8")}, 1}});
  CHECK_FALSE(brute_force_representable(broken).has_value());

  // The worked example is generated by its published model.
  const auto terry_model = brute_force_representable(terry::data());
  REQUIRE(terry_model.has_value());
  CHECK(extends(*terry_model, terry::data()).empty());

  const LearningSet wide(CriteriaSpec({{"a"}, {"b"}, {"c"}, {"d"}, {"e"}}), 2, {});
  CHECK_THROWS_AS(brute_force_representable(wide), SizeGuardError);
}

TEST_CASE("exhaustive search and the solver agree on small instances") {
  Rng rng(606);
  const Value grid[4] = {Value::parse("0"), Value::parse("0.25"), Value::parse("0.5"),
                         Value::parse("0.75")};
  std::vector<Criterion> crits = {{"a"}, {"b"}, {"c"}};
  int sat_count = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int p = 2 + static_cast<int>(rng.bounded(2));
    const int count = 1 + static_cast<int>(rng.bounded(6));
    std::vector<Alternative> alts;
    for (int j = 0; j < count; ++j) {
      Alternative alt;
      alt.id = "x" + std::to_string(j);
      for (int i = 0; i < 3; ++i) alt.profile.push_back(grid[rng.bounded(4)]);
      alt.label = 1 + static_cast<int>(rng.bounded(static_cast<uint64_t>(p)));
      alts.push_back(std::move(alt));
    }
    LearningSet data(CriteriaSpec(crits), p, std::move(alts));
    const bool solver_sat = solve(encode(data)).status == SolveStatus::sat;
    const auto oracle = brute_force_representable(data);
    CAPTURE(trial);
    CHECK(solver_sat == oracle.has_value());
    if (oracle) {
      CHECK(extends(*oracle, data).empty());
      ++sat_count;
    }
  }
  CHECK(sat_count > 10);  // the mix exercises both outcomes
}
