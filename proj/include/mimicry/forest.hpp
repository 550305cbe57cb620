#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mimicry {

struct LabeledSample {
  std::string mutant_id;
  std::string group_id;
  std::vector<double> features;
  bool truth = false;
};

struct ForestConfig {
  std::size_t n_trees = 100;
  /// 0 means floor(sqrt(d)).
  std::size_t features_per_split = 0;
  std::size_t min_samples_leaf = 1;
  std::uint64_t seed = 1;
  /// Permit single-class training data (the forest then predicts that class).
  bool allow_degenerate = false;
  /// Vote fraction at or above which the forest predicts true.
  double threshold = 0.5;

  std::size_t resolved_features_per_split(std::size_t dimension) const;
};

/// Gini impurity of a node with `positives` of `n` samples true.
double gini(std::size_t positives, std::size_t n);

struct Split {
  std::size_t feature = 0;
  double threshold = 0.0;
  double impurity_decrease = 0.0;
};

/// Best Gini split of `samples` restricted to `features`. Thresholds are
/// midpoints of consecutive distinct values; samples with value <= threshold go
/// left. Ties go to the lower feature index, then the lower threshold.
std::optional<Split> best_split(std::span<const LabeledSample> data, std::span<const std::size_t> samples,
                                std::span<const std::size_t> features, std::size_t min_samples_leaf);

/// One recorded split decision, for checking trees against an exhaustive scan.
struct SplitTrace {
  std::vector<std::size_t> samples;
  std::vector<std::size_t> features;
  std::optional<Split> chosen;
};

struct TreeNode {
  int feature = -1; // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  bool value = false;
};

class DecisionTree {
public:
  bool predict(std::span<const double> features) const;
  const std::vector<TreeNode> &nodes() const noexcept { return nodes_; }
  std::vector<TreeNode> &nodes() noexcept { return nodes_; }

private:
  std::vector<TreeNode> nodes_;
};

struct ForestPrediction {
  bool label = false;
  double score = 0.0;
};

class ForestModel {
public:
  ForestModel() = default;
  ForestModel(std::vector<DecisionTree> trees, std::size_t dimension, double threshold)
      : trees_(std::move(trees)), dimension_(dimension), threshold_(threshold) {}

  /// Fraction of trees voting true. Throws DimensionMismatch.
  ForestPrediction predict(std::span<const double> features) const;

  const std::vector<DecisionTree> &trees() const noexcept { return trees_; }
  std::size_t dimension() const noexcept { return dimension_; }
  double threshold() const noexcept { return threshold_; }

  void save(const std::filesystem::path &path) const;
  static ForestModel load(const std::filesystem::path &path);

private:
  std::vector<DecisionTree> trees_;
  std::size_t dimension_ = 0;
  double threshold_ = 0.5;
};

/// Grows `n_trees` trees on bootstrap resamples, each with its own seed derived
/// from cfg.seed and the tree index. `traces`, when given, receives one list of
/// split decisions per tree.
/// Throws DegenerateDataset, DimensionMismatch, ConfigInvalid.
ForestModel train_forest(std::span<const LabeledSample> data, const ForestConfig &cfg,
                         std::vector<std::vector<SplitTrace>> *traces = nullptr);

} // namespace mimicry
