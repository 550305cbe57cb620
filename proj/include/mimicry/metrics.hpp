#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mimicry/forest.hpp"

namespace mimicry {

struct ConfusionMatrix {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionMatrix &, const ConfusionMatrix &) = default;
};

struct MetricsReport {
  double precision = 0.0;
  double recall = 0.0;
  double mcc = 0.0;
  ConfusionMatrix matrix;
  /// Metrics whose denominator was zero; they are reported as 0.
  std::vector<std::string> degenerate;

  bool is_degenerate() const noexcept { return !degenerate.empty(); }
};

MetricsReport metrics_from(const ConfusionMatrix &m);

/// Throws LengthMismatch (also for empty input).
MetricsReport evaluate(const std::vector<bool> &predictions, const std::vector<bool> &truths);

/// "MCC 0.63, Precision 0.80, Recall 0.51".
std::string format_headline(double mcc, double precision, double recall);
std::string format_headline(const MetricsReport &r);

struct FoldResult {
  std::size_t fold = 0;
  std::vector<std::string> groups;
  MetricsReport metrics;
};

struct OutOfFoldPrediction {
  std::string mutant_id;
  std::string group_id;
  double score = 0.0;
  bool label = false;
  bool truth = false;
};

struct CrossValidationResult {
  std::vector<FoldResult> folds;
  /// Computed from the union of all out-of-fold predictions.
  MetricsReport pooled;
  /// Unweighted means of the per-fold precision, recall and MCC.
  double mean_precision = 0.0;
  double mean_recall = 0.0;
  double mean_mcc = 0.0;
  std::vector<OutOfFoldPrediction> predictions;
};

/// Distinct groups (sorted), shuffled with `seed`, dealt round-robin into `k`
/// folds. Throws TooFewGroups.
std::map<std::string, std::size_t> assign_folds(std::span<const LabeledSample> data, std::size_t k,
                                                std::uint64_t seed);

/// Grouped k-fold: each fold is scored by a forest trained on the others.
/// Training folds may hold a single class; the forest then predicts it.
CrossValidationResult cross_validate(std::span<const LabeledSample> data, std::size_t k, std::uint64_t seed,
                                     ForestConfig forest = {});

void to_json(nlohmann::json &j, const ConfusionMatrix &m);
void to_json(nlohmann::json &j, const MetricsReport &r);
void to_json(nlohmann::json &j, const CrossValidationResult &r);

} // namespace mimicry
