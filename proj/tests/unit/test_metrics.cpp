#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "../support/oracles.hpp"
#include "mimicry/error.hpp"
#include "mimicry/metrics.hpp"
#include "mimicry/rng.hpp"

using namespace mimicry;

namespace {

std::pair<std::vector<bool>, std::vector<bool>> expand(std::size_t tp, std::size_t fp, std::size_t fn, std::size_t tn) {
  std::vector<bool> p, t;
  auto add = [&](std::size_t n, bool pv, bool tv) {
    for (std::size_t i = 0; i < n; ++i) {
      p.push_back(pv);
      t.push_back(tv);
    }
  };
  add(tp, true, true);
  add(fp, true, false);
  add(fn, false, true);
  add(tn, false, false);
  return {p, t};
}

std::vector<LabeledSample> grouped(std::size_t groups, std::size_t per_group) {
  std::vector<LabeledSample> d;
  for (std::size_t g = 0; g < groups; ++g)
    for (std::size_t i = 0; i < per_group; ++i) {
      const double x = static_cast<double>(i) - static_cast<double>(per_group) / 2.0;
      d.push_back({"m" + std::to_string(g) + "_" + std::to_string(i), "G" + std::to_string(g), {x, double(g)}, x > 0});
    }
  return d;
}

} // namespace

TEST_CASE("confusion matrix with few positives") {
  const auto [p, t] = expand(2, 1, 3, 94);
  const auto r = evaluate(p, t);
  CHECK(r.precision == doctest::Approx(2.0 / 3.0));
  CHECK(r.recall == doctest::Approx(0.4));
  CHECK(std::abs(r.mcc - 0.4976) < 1e-3);
  CHECK(r.matrix == ConfusionMatrix{2, 1, 3, 94});
  CHECK_FALSE(r.is_degenerate());
}

TEST_CASE("perfect predictions") {
  const std::vector<bool> x = {true, false, false, true, false};
  const auto r = evaluate(x, x);
  CHECK(r.precision == 1.0);
  CHECK(r.recall == 1.0);
  CHECK(r.mcc == doctest::Approx(1.0));
}

TEST_CASE("random matrices match the rate-identity oracle") {
  Rng rng(17);
  for (int i = 0; i < 50; ++i) {
    const std::size_t tp = rng.below(40), fp = rng.below(40), fn = rng.below(40), tn = rng.below(200);
    if (tp + fp + fn + tn == 0) continue;
    const auto [p, t] = expand(tp, fp, fn, tn);
    const auto r = evaluate(p, t);
    const auto o = oracle::rates(double(tp), double(fp), double(fn), double(tn));
    CHECK(std::abs(r.precision - o.precision) <= 1e-9);
    CHECK(std::abs(r.recall - o.recall) <= 1e-9);
    CHECK(std::abs(r.mcc - o.mcc) <= 1e-9);
    CHECK(r.is_degenerate() == !(o.precision_defined && o.recall_defined && o.mcc_defined));
  }
}

TEST_CASE("inverting predictions negates mcc") {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    std::vector<bool> p, t;
    for (int j = 0; j < 30; ++j) {
      p.push_back(rng.below(2));
      t.push_back(rng.below(3) == 0);
    }
    const auto r = evaluate(p, t);
    if (r.is_degenerate()) continue;
    std::vector<bool> q;
    for (bool b : p) q.push_back(!b);
    CHECK(evaluate(q, t).mcc == -r.mcc);
  }
}

TEST_CASE("degenerate metrics are zero and named") {
  const auto r = evaluate({false, false}, {true, false});
  CHECK(r.precision == 0.0);
  CHECK(r.mcc == 0.0);
  CHECK(r.degenerate == std::vector<std::string>{"precision", "mcc"});
  CHECK_THROWS_AS(evaluate({true}, {true, false}), Error);
  CHECK_THROWS_AS(evaluate({}, {}), Error);
}

TEST_CASE("headline format") {
  CHECK(format_headline(0.63, 0.80, 0.51) == "MCC 0.63, Precision 0.80, Recall 0.51");
}

TEST_CASE("fold assignment") {
  const auto d = grouped(45, 2);
  const auto folds = assign_folds(d, 5, 1);
  CHECK(folds.size() == 45);
  std::map<std::size_t, int> per_fold;
  for (const auto &[g, f] : folds) ++per_fold[f];
  CHECK(per_fold.size() == 5);
  for (const auto &[f, n] : per_fold) CHECK(n == 9);
  CHECK(folds == assign_folds(d, 5, 1));
  CHECK(folds != assign_folds(d, 5, 2));

  for (const auto &[f, n] : [&] {
         std::map<std::size_t, int> m;
         for (const auto &[g, fold] : assign_folds(grouped(10, 1), 5, 3)) ++m[fold];
         return m;
       }())
    CHECK(n == 2);

  try {
    assign_folds(grouped(4, 3), 5, 1);
    FAIL("expected TooFewGroups");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::TooFewGroups);
  }
}

TEST_CASE("cross validation keeps groups together") {
  const auto d = grouped(10, 12);
  ForestConfig cfg;
  cfg.n_trees = 10;
  const auto cv = cross_validate(d, 5, 4, cfg);
  REQUIRE(cv.folds.size() == 5);
  std::set<std::string> seen;
  for (const auto &f : cv.folds) {
    CHECK(f.groups.size() == 2);
    for (const auto &g : f.groups) CHECK(seen.insert(g).second);
  }
  CHECK(cv.predictions.size() == d.size());
  CHECK(cv.pooled.matrix.total() == d.size());
  double mean = 0;
  for (const auto &f : cv.folds) mean += f.metrics.mcc / 5.0;
  CHECK(cv.mean_mcc == doctest::Approx(mean));
  CHECK(cv.pooled.mcc > 0.8);

  const nlohmann::json j = cv;
  CHECK(j.contains("pooled"));
  CHECK(j["per_fold_mean"].contains("mcc"));
  CHECK(j["folds"].size() == 5);

  const auto again = cross_validate(d, 5, 4, cfg);
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(again.predictions[i].score == cv.predictions[i].score);
}
