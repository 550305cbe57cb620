#include "mimicry/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include <nlohmann/json.hpp>

#include "mimicry/error.hpp"
#include "mimicry/rng.hpp"

namespace mimicry {

MetricsReport metrics_from(const ConfusionMatrix &m) {
  MetricsReport r;
  r.matrix = m;
  const auto d = [](std::size_t v) { return static_cast<double>(v); };

  if (m.tp + m.fp == 0)
    r.degenerate.emplace_back("precision");
  else
    r.precision = d(m.tp) / d(m.tp + m.fp);

  if (m.tp + m.fn == 0)
    r.degenerate.emplace_back("recall");
  else
    r.recall = d(m.tp) / d(m.tp + m.fn);

  const double denom = d(m.tp + m.fp) * d(m.tp + m.fn) * d(m.tn + m.fp) * d(m.tn + m.fn);
  if (denom == 0.0)
    r.degenerate.emplace_back("mcc");
  else
    r.mcc = (d(m.tp) * d(m.tn) - d(m.fp) * d(m.fn)) / std::sqrt(denom);
  return r;
}

MetricsReport evaluate(const std::vector<bool> &predictions, const std::vector<bool> &truths) {
  if (predictions.size() != truths.size())
    throw Error(ErrorKind::LengthMismatch, std::to_string(predictions.size()) + " predictions vs " +
                                               std::to_string(truths.size()) + " truths");
  if (predictions.empty()) throw Error(ErrorKind::LengthMismatch, "nothing to evaluate");
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const bool p = predictions[i];
    const bool t = truths[i];
    if (p && t) ++m.tp;
    else if (p) ++m.fp;
    else if (t) ++m.fn;
    else ++m.tn;
  }
  return metrics_from(m);
}

std::string format_headline(double mcc, double precision, double recall) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "MCC %.2f, Precision %.2f, Recall %.2f", mcc, precision, recall);
  return buf;
}

std::string format_headline(const MetricsReport &r) { return format_headline(r.mcc, r.precision, r.recall); }

std::map<std::string, std::size_t> assign_folds(std::span<const LabeledSample> data, std::size_t k,
                                                std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::ConfigInvalid, "need at least 2 folds");
  std::set<std::string> distinct;
  for (const auto &s : data) distinct.insert(s.group_id);
  if (distinct.size() < k)
    throw Error(ErrorKind::TooFewGroups,
                std::to_string(distinct.size()) + " groups cannot fill " + std::to_string(k) + " folds");
  std::vector<std::string> groups(distinct.begin(), distinct.end());
  Rng rng(seed);
  rng.shuffle(std::span(groups));
  std::map<std::string, std::size_t> fold_of;
  for (std::size_t i = 0; i < groups.size(); ++i) fold_of[groups[i]] = i % k;
  return fold_of;
}

CrossValidationResult cross_validate(std::span<const LabeledSample> data, std::size_t k, std::uint64_t seed,
                                     ForestConfig forest) {
  const auto fold_of = assign_folds(data, k, seed);
  forest.allow_degenerate = true;

  CrossValidationResult result;
  std::vector<bool> all_pred, all_truth;
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::vector<LabeledSample> train;
    std::vector<const LabeledSample *> test;
    for (const auto &s : data) {
      if (fold_of.at(s.group_id) == fold)
        test.push_back(&s);
      else
        train.push_back(s);
    }
    ForestConfig cfg = forest;
    cfg.seed = derive_seed(forest.seed, fold);
    const auto model = train_forest(train, cfg);

    FoldResult fr;
    fr.fold = fold;
    for (const auto &[g, f] : fold_of)
      if (f == fold) fr.groups.push_back(g);
    std::vector<bool> pred, truth;
    for (const auto *s : test) {
      const auto p = model.predict(s->features);
      pred.push_back(p.label);
      truth.push_back(s->truth);
      result.predictions.push_back({s->mutant_id, s->group_id, p.score, p.label, s->truth});
    }
    fr.metrics = evaluate(pred, truth);
    all_pred.insert(all_pred.end(), pred.begin(), pred.end());
    all_truth.insert(all_truth.end(), truth.begin(), truth.end());
    result.folds.push_back(std::move(fr));
  }
  result.pooled = evaluate(all_pred, all_truth);
  for (const auto &f : result.folds) {
    result.mean_precision += f.metrics.precision / static_cast<double>(k);
    result.mean_recall += f.metrics.recall / static_cast<double>(k);
    result.mean_mcc += f.metrics.mcc / static_cast<double>(k);
  }
  return result;
}

void to_json(nlohmann::json &j, const ConfusionMatrix &m) {
  j = {{"tp", m.tp}, {"fp", m.fp}, {"fn", m.fn}, {"tn", m.tn}};
}

void to_json(nlohmann::json &j, const MetricsReport &r) {
  j = {{"precision", r.precision},
       {"recall", r.recall},
       {"mcc", r.mcc},
       {"matrix", r.matrix},
       {"degenerate", r.degenerate}};
}

void to_json(nlohmann::json &j, const CrossValidationResult &r) {
  nlohmann::json folds = nlohmann::json::array();
  for (const auto &f : r.folds) folds.push_back({{"fold", f.fold}, {"groups", f.groups}, {"metrics", f.metrics}});
  j = {{"folds", std::move(folds)},
       {"pooled", r.pooled},
       {"per_fold_mean", {{"precision", r.mean_precision}, {"recall", r.mean_recall}, {"mcc", r.mean_mcc}}}};
}

} // namespace mimicry
