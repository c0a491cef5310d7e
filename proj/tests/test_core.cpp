#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "ncs/core.hpp"
#include "ncs/errors.hpp"
#include "ncs/io.hpp"
#include "ncs/rng.hpp"
#include "terry.hpp"

using namespace ncs;

TEST_CASE("decimal values parse, print and compare exactly") {
  CHECK(Value::parse("2.66").units() == 2'660'000'000);
  CHECK(Value::parse("-30.7").units() == -30'700'000'000);
  CHECK(Value::parse("16973").str() == "16973");
  CHECK(Value::parse("2.50").str() == "2.5");
  CHECK(Value::parse("0.000001").str() == "0.000001");
  CHECK(Value::parse("0").str() == "0");
  CHECK(Value::parse("2.2") < Value::parse("2.25"));
  CHECK(Value::above_all() > Value::parse("999999999"));
  CHECK(Value::above_all() == Value::above_all());
  CHECK(Value::from_double(2.2) == Value::parse("2.2"));

  CHECK_THROWS_AS(Value::parse(""), ParseError);
  CHECK_THROWS_AS(Value::parse("1."), ParseError);
  CHECK_THROWS_AS(Value::parse(".5"), ParseError);
  CHECK_THROWS_AS(Value::parse("1.0000000001"), ParseError);  // ten fractional digits
  CHECK_THROWS_AS(Value::parse("12,5"), ParseError);
  CHECK_THROWS_AS(Value::above_all().negated(), InputError);
}

TEST_CASE("favorable coalition matches the worked example") {
  const auto data = terry::data();
  const auto model = terry::model();
  const auto& m1 = data.alternatives()[0].profile;
  const auto& m6 = data.alternatives()[5].profile;

  // Reflexivity gives the full coalition.
  CHECK(favorable_coalition(m1, m1) == Coalition::full(4));

  // m1 is at least two stars everywhere at the first frontier.
  CHECK(favorable_coalition(m1, model.frontier(1)) == Coalition::full(4));
  // m6 passes the second frontier on cost only.
  CHECK(favorable_coalition(m6, model.frontier(2)) == Coalition{0b0001});

  CHECK_THROWS_AS(favorable_coalition(m1, Profile{Value::parse("1")}), InputError);
}

TEST_CASE("frontier entries above every value never match") {
  const Profile x = {Value::parse("5"), Value::parse("5")};
  const Profile b = {Value::parse("1"), Value::above_all()};
  CHECK(favorable_coalition(x, b) == Coalition{0b01});
}

TEST_CASE("dominance is weak Pareto dominance on the oriented scales") {
  const auto model = terry::model();
  CHECK(dominates(model.frontier(1), model.frontier(1)));
  // The frontiers are nested: the upper one dominates, not the other way.
  CHECK(dominates(model.frontier(2), model.frontier(1)));
  CHECK_FALSE(dominates(model.frontier(1), model.frontier(2)));

  const Profile zeros = {Value::parse("0"), Value::parse("0")};
  const Profile ones = {Value::parse("1"), Value::parse("1")};
  CHECK_FALSE(dominates(zeros, ones));
  CHECK(dominates(ones, zeros));
}

TEST_CASE("assignment reproduces the published classes") {
  const auto data = terry::data();
  const auto model = terry::model();
  const int expected[] = {2, 1, 2, 2, 3, 1};
  for (size_t i = 0; i < data.size(); ++i) {
    CAPTURE(data.alternatives()[i].id);
    CHECK(assign(model, data.alternatives()[i].profile) == expected[i]);
  }

  // m3: sufficient {cost, road holding} at the first frontier, only {cost}
  // (insufficient) at the second.
  const auto& m3 = data.alternatives()[2].profile;
  CHECK(favorable_coalition(m3, model.frontier(1)) == Coalition{0b1001});
  CHECK(model.sufficient().contains({0b1001}));
  CHECK(favorable_coalition(m3, model.frontier(2)) == Coalition{0b0001});
  CHECK_FALSE(model.sufficient().contains({0b0001}));
}

TEST_CASE("majority-rule upsets") {
  const auto third = Value::parse("0.333333333");
  const std::vector<Value> w = {third, third, third};
  const auto upset = mr_upset(w, Value::parse("0.5"));
  CHECK(upset.minimal_members() == std::vector<uint32_t>{0b011, 0b101, 0b110});

  // A very different weight vector induces the same family.
  const std::vector<Value> w2 = {Value::parse("0.49"), Value::parse("0.49"), Value::parse("0.02")};
  CHECK(mr_upset(w2, Value::parse("0.5")) == upset);

  // Zero threshold admits every coalition including the empty one.
  const auto all = mr_upset(w, Value::parse("0"));
  CHECK(all == UpSet::all(3));
  CHECK(all.contains({0}));

  CHECK_THROWS_AS(mr_upset(std::vector<Value>{Value::parse("-0.1")}, Value::parse("0.5")),
                  InputError);
}

TEST_CASE("majority rule is homogeneous") {
  Rng rng(99);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(4));
    std::vector<Value> w;
    for (int i = 0; i < n; ++i) w.push_back(rng.unit_value());
    const Value lambda = rng.unit_value();
    for (int64_t c : {2, 3, 10}) {
      std::vector<Value> scaled;
      for (const Value& wi : w) scaled.push_back(Value::from_units(wi.units() * c));
      CHECK(mr_upset(scaled, Value::from_units(lambda.units() * c)) == mr_upset(w, lambda));
    }
  }
}

TEST_CASE("upset construction enforces and preserves upward closure") {
  CHECK_THROWS_AS(UpSet(2, std::vector<uint8_t>{0, 1, 0, 0}), InputError);

  Rng rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + static_cast<int>(rng.bounded(4));
    std::vector<uint32_t> minimal;
    for (int k = 0; k < 3; ++k) minimal.push_back(static_cast<uint32_t>(rng.bounded(1u << n)));
    const auto upset = UpSet::from_minimal(n, minimal);
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      if (!upset.contains({mask})) continue;
      for (int i = 0; i < n; ++i) CHECK(upset.contains({mask | (1u << i)}));
    }
  }
}

TEST_CASE("extends lists exactly the disagreements") {
  const auto data = terry::data();
  const auto model = terry::model();
  CHECK(extends(model, data).empty());

  auto alts = data.alternatives();
  alts[4].label = 1;  // m5 really sorts to class 3
  const LearningSet mutated(data.criteria(), 3, std::move(alts));
  const auto violations = extends(model, mutated);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0] == Violation{"m5", 1, 3});

  const LearningSet empty(data.criteria(), 3, {});
  CHECK(extends(model, empty).empty());

  const LearningSet other(CriteriaSpec({{"a"}, {"b"}, {"c"}, {"d"}}), 3, {});
  CHECK_THROWS_AS(extends(model, other), InputError);
}

namespace {

UncsModel random_model(Rng& rng, int n, int p) {
  std::vector<Profile> frontiers(static_cast<size_t>(p - 1), Profile(static_cast<size_t>(n)));
  for (int i = 0; i < n; ++i) {
    std::vector<Value> column;
    for (int h = 0; h < p - 1; ++h) column.push_back(rng.unit_value());
    std::sort(column.begin(), column.end());
    for (int h = 0; h < p - 1; ++h) frontiers[static_cast<size_t>(h)][static_cast<size_t>(i)] = column[static_cast<size_t>(h)];
  }
  std::vector<uint32_t> minimal;
  const int k = 1 + static_cast<int>(rng.bounded(3));
  for (int j = 0; j < k; ++j) minimal.push_back(static_cast<uint32_t>(rng.bounded(1u << n)));
  std::vector<Criterion> criteria;
  for (int i = 1; i <= n; ++i) criteria.push_back({"c" + std::to_string(i)});
  return UncsModel(CriteriaSpec(std::move(criteria)), p, std::move(frontiers),
                   UpSet::from_minimal(n, minimal));
}

}  // namespace

TEST_CASE("assignment is monotone with respect to dominance") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng.bounded(4));
    const int p = 2 + static_cast<int>(rng.bounded(3));
    const auto model = random_model(rng, n, p);

    Profile low(static_cast<size_t>(n)), high(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      const Value a = rng.unit_value();
      const Value b = rng.unit_value();
      low[static_cast<size_t>(i)] = std::min(a, b);
      high[static_cast<size_t>(i)] = std::max(a, b);
    }
    REQUIRE(dominates(high, low));
    CHECK(assign(model, high) >= assign(model, low));
  }
}

TEST_CASE("the favorable coalitions of a pair cover all criteria") {
  Rng rng(11);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 1 + static_cast<int>(rng.bounded(6));
    Profile x(static_cast<size_t>(n)), y(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
      x[static_cast<size_t>(i)] = rng.unit_value();
      y[static_cast<size_t>(i)] = rng.bounded(2) ? x[static_cast<size_t>(i)] : rng.unit_value();
    }
    const uint32_t together = favorable_coalition(x, y).mask | favorable_coalition(y, x).mask;
    CHECK(together == Coalition::full(n).mask);
  }
}

TEST_CASE("assignments are unchanged while the threshold stays inside the induced gap") {
  Rng rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng.bounded(3));
    std::vector<Value> w;
    for (int i = 0; i < n; ++i) w.push_back(rng.unit_value());
    const Value lambda = rng.unit_value();
    const auto upset = mr_upset(w, lambda);

    // Weight sums closest to the threshold from below and above.
    int64_t largest_insufficient = 0;
    int64_t smallest_sufficient = 0;
    for (const Value& wi : w) smallest_sufficient += wi.units();
    bool any_insufficient = false, any_sufficient = false;
    for (uint32_t mask = 0; mask < (1u << n); ++mask) {
      int64_t sum = 0;
      for (int i = 0; i < n; ++i) {
        if (mask & (1u << i)) sum += w[static_cast<size_t>(i)].units();
      }
      if (upset.contains({mask})) {
        smallest_sufficient = std::min(smallest_sufficient, sum);
        any_sufficient = true;
      } else {
        largest_insufficient = std::max(largest_insufficient, sum);
        any_insufficient = true;
      }
    }
    if (!any_sufficient || !any_insufficient) continue;
    for (int step = 1; step <= 3; ++step) {
      const int64_t span = smallest_sufficient - largest_insufficient;
      if (span <= 1) break;
      const int64_t inside = largest_insufficient + 1 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(span - 1)));
      CHECK(mr_upset(w, Value::from_units(inside)) == upset);
    }
  }
}

TEST_CASE("learning-set CSV round-trips bit-exactly with orientation") {
  const auto data = terry::data();
  std::ostringstream out;
  write_learning_csv(data, out);
  const std::string text = out.str();
  CHECK(text.substr(0, text.find('\n')) == "id,cost,acceleration,braking,road holding,class");
  CHECK(text.find("m1,16973,29,2.66,2.5,2") != std::string::npos);

  std::istringstream in(text);
  const auto back = read_learning_csv(in, {"cost", "acceleration"});
  REQUIRE(back.size() == data.size());
  CHECK(back.criteria() == data.criteria());
  CHECK(back.classes() == 3);
  for (size_t i = 0; i < data.size(); ++i) {
    CHECK(back.alternatives()[i].id == data.alternatives()[i].id);
    CHECK(back.alternatives()[i].profile == data.alternatives()[i].profile);
    CHECK(back.alternatives()[i].label == data.alternatives()[i].label);
  }

  std::ostringstream out2;
  write_learning_csv(back, out2);
  CHECK(out2.str() == text);
}

TEST_CASE("csv reader rejects malformed input") {
  std::istringstream missing_header("m1,1,2\n");
  CHECK_THROWS_AS(read_learning_csv(missing_header), ParseError);
  std::istringstream short_row("id,a,b,class\nm1,1,2\n");
  CHECK_THROWS_AS(read_learning_csv(short_row), ParseError);
  std::istringstream bad_class("id,a,class\nm1,1,first\n");
  CHECK_THROWS_AS(read_learning_csv(bad_class), ParseError);
  std::istringstream dup_id("id,a,class\nm1,1,1\nm1,2,2\n");
  CHECK_THROWS_AS(read_learning_csv(dup_id), InputError);
  std::istringstream fine("id,a,class\nm1,1,1\n");
  CHECK_THROWS_AS(read_learning_csv(fine, {"nope"}), InputError);
}

TEST_CASE("model JSON round-trips both model kinds") {
  const auto uncs = terry::model();
  const std::string uncs_text = write_model_json(uncs);
  std::istringstream uncs_in(uncs_text);
  const auto uncs_back = read_model_json(uncs_in);
  const auto& u = std::get<UncsModel>(uncs_back);
  CHECK(u.criteria() == uncs.criteria());
  CHECK(u.classes() == uncs.classes());
  CHECK(u.frontiers() == uncs.frontiers());
  CHECK(u.sufficient() == uncs.sufficient());

  const MrSortModel mr(terry::criteria(), 2, {terry::profile("17000", "30", "2", "2")},
                       {Value::parse("0.4"), Value::parse("0.1"), Value::parse("0.25"),
                        Value::parse("0.25")},
                       Value::parse("0.6"));
  const std::string mr_text = write_model_json(mr);
  std::istringstream mr_in(mr_text);
  const auto mr_back = std::get<MrSortModel>(read_model_json(mr_in));
  CHECK(mr_back.criteria() == mr.criteria());
  CHECK(mr_back.frontiers() == mr.frontiers());
  CHECK(mr_back.weights() == mr.weights());
  CHECK(mr_back.lambda() == mr.lambda());

  // The sentinel travels as null.
  const UncsModel with_sentinel(CriteriaSpec({{"a"}}), 2,
                                {Profile{Value::above_all()}}, UpSet::all(1));
  const std::string text = write_model_json(with_sentinel);
  CHECK(text.find("null") != std::string::npos);
  std::istringstream sentinel_in(text);
  CHECK(std::get<UncsModel>(read_model_json(sentinel_in)).frontiers()[0][0].is_above_all());
}

TEST_CASE("model invariants are enforced at construction") {
  // Frontiers must be nested.
  CHECK_THROWS_AS(UncsModel(CriteriaSpec({{"a"}}), 3,
                            {Profile{Value::parse("0.8")}, Profile{Value::parse("0.2")}},
                            UpSet::all(1)),
                  InputError);
  // The sentinel nests above everything.
  CHECK_NOTHROW(UncsModel(CriteriaSpec({{"a"}}), 3,
                          {Profile{Value::parse("0.8")}, Profile{Value::above_all()}},
                          UpSet::all(1)));
  // Weight count must match the criteria.
  CHECK_THROWS_AS(MrSortModel(CriteriaSpec({{"a"}, {"b"}}), 2,
                              {Profile{Value::parse("0.5"), Value::parse("0.5")}},
                              {Value::parse("1")}, Value::parse("0.5")),
                  InputError);
  // Class labels must stay in range.
  CHECK_THROWS_AS(LearningSet(CriteriaSpec({{"a"}}), 2, {{"x", {Value::parse("0")}, 3}}),
                  InputError);
}
