#include <doctest.h>

#include <cmath>
#include <fstream>

#include "../support/oracles.hpp"
#include "mimicry/error.hpp"
#include "mimicry/forest.hpp"
#include "mimicry/process.hpp"
#include "mimicry/rng.hpp"

using namespace mimicry;

namespace {

LabeledSample sample(std::vector<double> x, bool y, std::string group = "g") {
  return LabeledSample{"m", std::move(group), std::move(x), y};
}

std::vector<LabeledSample> separable(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1);
    out.push_back(sample({a, b, c}, a + 0.5 * b > 0.1));
  }
  return out;
}

DecisionTree leaf(bool v) {
  DecisionTree t;
  t.nodes().push_back(TreeNode{-1, 0, -1, -1, v});
  return t;
}

} // namespace

TEST_CASE("gini") {
  CHECK(gini(0, 0) == 0.0);
  CHECK(gini(2, 4) == doctest::Approx(0.5));
  CHECK(gini(4, 4) == 0.0);
  CHECK(gini(1, 3) == doctest::Approx(4.0 / 9.0));
}

TEST_CASE("pure split of a balanced node") {
  const std::vector<LabeledSample> d = {sample({0}, false), sample({1}, false), sample({2}, true), sample({3}, true)};
  const std::vector<std::size_t> rows = {0, 1, 2, 3}, feats = {0};
  const auto s = best_split(d, rows, feats, 1);
  REQUIRE(s);
  CHECK(s->feature == 0);
  CHECK(s->threshold == 1.5);
  CHECK(s->impurity_decrease == doctest::Approx(0.5));
}

TEST_CASE("no split on constant features") {
  const std::vector<LabeledSample> d = {sample({1, 1}, false), sample({1, 1}, true)};
  const std::vector<std::size_t> rows = {0, 1}, feats = {0, 1};
  CHECK_FALSE(best_split(d, rows, feats, 1));
}

TEST_CASE("ties go to the lower feature then the lower threshold") {
  // Feature 0 and 1 carry the same information.
  const std::vector<LabeledSample> d = {sample({0, 0}, false), sample({1, 1}, true)};
  const std::vector<std::size_t> rows = {0, 1}, feats = {0, 1};
  CHECK(best_split(d, rows, feats, 1)->feature == 0);
  // Symmetric data: both thresholds give the same decrease.
  const std::vector<LabeledSample> e = {sample({0}, true), sample({1}, false), sample({2}, true)};
  const std::vector<std::size_t> rows3 = {0, 1, 2}, f0 = {0};
  CHECK(best_split(e, rows3, f0, 1)->threshold == 0.5);
}

TEST_CASE("split matches the exhaustive oracle on random tiny data") {
  Rng rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<LabeledSample> d;
    std::vector<oracle::Point> pts;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> x = {static_cast<double>(rng.below(4)), rng.uniform()};
      const bool y = rng.below(2);
      d.push_back(sample(x, y));
      pts.push_back({x, y});
    }
    std::vector<std::size_t> rows(n);
    for (std::size_t i = 0; i < n; ++i) rows[i] = i;
    const std::vector<std::size_t> feats = {0, 1};
    const auto got = best_split(d, rows, feats, 1);
    const auto want = oracle::exhaustive_split(pts, rows, feats, 1);
    REQUIRE(got.has_value() == want.has_value());
    if (!got) continue;
    CHECK(got->feature == want->feature);
    CHECK(got->threshold == want->threshold);
    CHECK(got->impurity_decrease == doctest::Approx(want->decrease).epsilon(1e-12));
  }
}

TEST_CASE("1-D separable data is learned exactly") {
  std::vector<LabeledSample> d;
  for (int i = 0; i < 40; ++i) d.push_back(sample({i - 19.5}, i - 19.5 > 0));
  ForestConfig cfg;
  cfg.n_trees = 30;
  const auto model = train_forest(d, cfg);
  for (const auto &s : d) CHECK(model.predict(s.features).label == s.truth);
}

TEST_CASE("degenerate data") {
  std::vector<LabeledSample> d = {sample({1}, true), sample({2}, true)};
  try {
    train_forest(d, {});
    FAIL("expected DegenerateDataset");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DegenerateDataset);
  }
  ForestConfig cfg;
  cfg.allow_degenerate = true;
  const auto model = train_forest(d, cfg);
  for (double x : {-5.0, 0.0, 1.5, 100.0}) {
    const auto p = model.predict(std::vector<double>{x});
    CHECK(p.label);
    CHECK(p.score == 1.0);
  }
}

TEST_CASE("votes") {
  std::vector<DecisionTree> all_true(10, leaf(true));
  const auto p = ForestModel(all_true, 2, 0.5).predict(std::vector<double>{0, 0});
  CHECK(p.label);
  CHECK(p.score == 1.0);

  std::vector<DecisionTree> mixed;
  for (int i = 0; i < 100; ++i) mixed.push_back(leaf(i < 40));
  const auto q = ForestModel(mixed, 1, 0.5).predict(std::vector<double>{0});
  CHECK_FALSE(q.label);
  CHECK(q.score == doctest::Approx(0.4));
  CHECK(ForestModel(mixed, 1, 0.4).predict(std::vector<double>{0}).label);

  try {
    ForestModel(mixed, 1, 0.5).predict(std::vector<double>{0, 1});
    FAIL("expected DimensionMismatch");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}

TEST_CASE("input validation") {
  std::vector<LabeledSample> d = {sample({1, 2}, true), sample({1}, false)};
  CHECK_THROWS_AS(train_forest(d, {}), Error);
  CHECK_THROWS_AS(train_forest(std::vector<LabeledSample>{}, {}), Error);
}

TEST_CASE("held-out accuracy and determinism") {
  const auto train = separable(200, 1);
  const auto test = separable(200, 2);
  ForestConfig cfg;
  cfg.seed = 9;
  const auto a = train_forest(train, cfg);
  const auto b = train_forest(train, cfg);
  std::size_t correct = 0;
  for (const auto &s : test) {
    const auto pa = a.predict(s.features);
    CHECK(pa.score == b.predict(s.features).score);
    correct += pa.label == s.truth;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(test.size()) >= 0.95);
  cfg.seed = 10;
  const auto c = train_forest(train, cfg);
  bool differs = false;
  for (std::size_t t = 0; t < a.trees().size() && !differs; ++t)
    differs = a.trees()[t].nodes().size() != c.trees()[t].nodes().size();
  CHECK(differs);
}

TEST_CASE("recorded splits are optimal for their feature subsets") {
  Rng rng(21);
  std::vector<LabeledSample> d;
  std::vector<oracle::Point> pts;
  for (int i = 0; i < 8; ++i) {
    std::vector<double> x = {static_cast<double>(rng.below(5)), static_cast<double>(rng.below(5))};
    const bool y = rng.below(2);
    d.push_back(sample(x, y));
    pts.push_back({x, y});
  }
  d[0].truth = true;
  d[1].truth = false;
  pts[0].y = true;
  pts[1].y = false;
  ForestConfig cfg;
  cfg.n_trees = 20;
  std::vector<std::vector<SplitTrace>> traces;
  train_forest(d, cfg, &traces);
  REQUIRE(traces.size() == 20);
  std::size_t checked = 0;
  for (const auto &tree : traces)
    for (const auto &t : tree) {
      CHECK(t.features.size() == 1);
      const auto want = oracle::exhaustive_split(pts, t.samples, t.features, 1);
      REQUIRE(t.chosen.has_value() == want.has_value());
      if (!want) continue;
      CHECK(t.chosen->feature == want->feature);
      CHECK(t.chosen->threshold == want->threshold);
      ++checked;
    }
  CHECK(checked > 0);
}

TEST_CASE("save and load") {
  const auto d = separable(60, 4);
  ForestConfig cfg;
  cfg.n_trees = 7;
  cfg.threshold = 0.3;
  const auto m = train_forest(d, cfg);
  TempDir dir;
  m.save(dir.path() / "f.bin");
  const auto back = ForestModel::load(dir.path() / "f.bin");
  CHECK(back.dimension() == 3);
  CHECK(back.threshold() == 0.3);
  REQUIRE(back.trees().size() == 7);
  for (const auto &s : d) CHECK(back.predict(s.features).score == m.predict(s.features).score);

  std::ofstream(dir.path() / "bad.bin") << "garbage";
  CHECK_THROWS_AS(ForestModel::load(dir.path() / "bad.bin"), Error);
}

TEST_CASE("feature subset size") {
  ForestConfig cfg;
  CHECK(cfg.resolved_features_per_split(64) == 8);
  CHECK(cfg.resolved_features_per_split(2) == 1);
  CHECK(cfg.resolved_features_per_split(1) == 1);
  cfg.features_per_split = 100;
  CHECK(cfg.resolved_features_per_split(5) == 5);
}
