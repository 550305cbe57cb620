#include "mimicry/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include "mimicry/error.hpp"
#include "mimicry/rng.hpp"

namespace mimicry {
namespace {

constexpr char kMagic[8] = {'M', 'I', 'M', 'F', 'R', 'S', 'T', '\0'};
constexpr std::uint32_t kVersion = 1;
constexpr double kTieTolerance = 1e-12;

class TreeBuilder {
public:
  TreeBuilder(std::span<const LabeledSample> data, const ForestConfig &cfg, std::size_t dimension, Rng &rng,
              std::vector<SplitTrace> *trace)
      : data_(data), cfg_(cfg), dimension_(dimension), rng_(rng), trace_(trace) {}

  DecisionTree build(std::vector<std::size_t> samples) {
    grow(std::move(samples));
    return std::move(tree_);
  }

private:
  int grow(std::vector<std::size_t> samples) {
    const int id = static_cast<int>(tree_.nodes().size());
    tree_.nodes().push_back({});
    std::size_t positives = 0;
    for (auto s : samples) positives += data_[s].truth;
    tree_.nodes()[id].value = 2 * positives >= samples.size();

    if (positives == 0 || positives == samples.size() || samples.size() < 2 * cfg_.min_samples_leaf) return id;

    const auto features = draw_features();
    const auto split = best_split(data_, samples, features, cfg_.min_samples_leaf);
    if (trace_) trace_->push_back({samples, features, split});
    if (!split) return id;

    std::vector<std::size_t> left, right;
    for (auto s : samples) (data_[s].features[split->feature] <= split->threshold ? left : right).push_back(s);
    samples.clear();
    samples.shrink_to_fit();

    const int l = grow(std::move(left));
    const int r = grow(std::move(right));
    auto &node = tree_.nodes()[id];
    node.feature = static_cast<int>(split->feature);
    node.threshold = split->threshold;
    node.left = l;
    node.right = r;
    return id;
  }

  std::vector<std::size_t> draw_features() {
    std::vector<std::size_t> all(dimension_);
    std::iota(all.begin(), all.end(), 0);
    const auto m = cfg_.resolved_features_per_split(dimension_);
    for (std::size_t i = 0; i < m; ++i) std::swap(all[i], all[i + rng_.below(dimension_ - i)]);
    all.resize(m);
    std::ranges::sort(all);
    return all;
  }

  std::span<const LabeledSample> data_;
  const ForestConfig &cfg_;
  std::size_t dimension_;
  Rng &rng_;
  std::vector<SplitTrace> *trace_;
  DecisionTree tree_;
};

template <class T> void write_pod(std::ostream &out, const T &v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

template <class T> T read_pod(std::istream &in) {
  T v{};
  in.read(reinterpret_cast<char *>(&v), sizeof v);
  if (!in) throw Error(ErrorKind::Io, "truncated forest file");
  return v;
}

} // namespace

std::size_t ForestConfig::resolved_features_per_split(std::size_t dimension) const {
  std::size_t m = features_per_split;
  if (m == 0) m = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(dimension))));
  return std::clamp<std::size_t>(m, 1, std::max<std::size_t>(dimension, 1));
}

double gini(std::size_t positives, std::size_t n) {
  if (n == 0) return 0.0;
  const double p = static_cast<double>(positives) / static_cast<double>(n);
  return 1.0 - p * p - (1.0 - p) * (1.0 - p);
}

std::optional<Split> best_split(std::span<const LabeledSample> data, std::span<const std::size_t> samples,
                                std::span<const std::size_t> features, std::size_t min_samples_leaf) {
  const std::size_t n = samples.size();
  std::size_t positives = 0;
  for (auto s : samples) positives += data[s].truth;
  const double parent = gini(positives, n);

  std::vector<std::size_t> sorted_features(features.begin(), features.end());
  std::ranges::sort(sorted_features);

  std::optional<Split> best;
  std::vector<std::pair<double, bool>> column(n);
  for (auto f : sorted_features) {
    for (std::size_t i = 0; i < n; ++i) column[i] = {data[samples[i]].features[f], data[samples[i]].truth};
    std::ranges::sort(column, {}, &std::pair<double, bool>::first);

    std::size_t left_pos = 0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      left_pos += column[i].second;
      if (column[i].first == column[i + 1].first) continue;
      const std::size_t nl = i + 1;
      const std::size_t nr = n - nl;
      if (nl < min_samples_leaf || nr < min_samples_leaf) continue;
      const double decrease = parent - (static_cast<double>(nl) / static_cast<double>(n)) * gini(left_pos, nl) -
                              (static_cast<double>(nr) / static_cast<double>(n)) * gini(positives - left_pos, nr);
      if (!best || decrease > best->impurity_decrease + kTieTolerance)
        best = Split{f, 0.5 * (column[i].first + column[i + 1].first), decrease};
    }
  }
  return best;
}

bool DecisionTree::predict(std::span<const double> features) const {
  int at = 0;
  while (nodes_[static_cast<std::size_t>(at)].feature >= 0) {
    const auto &node = nodes_[static_cast<std::size_t>(at)];
    at = features[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
  }
  return nodes_[static_cast<std::size_t>(at)].value;
}

ForestPrediction ForestModel::predict(std::span<const double> features) const {
  if (features.size() != dimension_)
    throw Error(ErrorKind::DimensionMismatch, "expected " + std::to_string(dimension_) + " features, got " +
                                                  std::to_string(features.size()));
  std::size_t votes = 0;
  for (const auto &t : trees_) votes += t.predict(features);
  const double score = trees_.empty() ? 0.0 : static_cast<double>(votes) / static_cast<double>(trees_.size());
  return {score >= threshold_, score};
}

void ForestModel::save(const std::filesystem::path &path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  out.write(kMagic, sizeof kMagic);
  write_pod(out, kVersion);
  write_pod(out, static_cast<std::uint64_t>(dimension_));
  write_pod(out, threshold_);
  write_pod(out, static_cast<std::uint32_t>(trees_.size()));
  for (const auto &t : trees_) {
    write_pod(out, static_cast<std::uint32_t>(t.nodes().size()));
    for (const auto &n : t.nodes()) {
      write_pod(out, static_cast<std::int32_t>(n.feature));
      write_pod(out, n.threshold);
      write_pod(out, static_cast<std::int32_t>(n.left));
      write_pod(out, static_cast<std::int32_t>(n.right));
      write_pod(out, static_cast<std::uint8_t>(n.value));
    }
  }
}

ForestModel ForestModel::load(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::MissingUpstreamArtifact, "forest file " + path.string());
  char magic[8];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0) throw Error(ErrorKind::Io, "not a forest file");
  if (const auto v = read_pod<std::uint32_t>(in); v != kVersion)
    throw Error(ErrorKind::Io, "unsupported forest version " + std::to_string(v));
  const auto dimension = read_pod<std::uint64_t>(in);
  const auto threshold = read_pod<double>(in);
  const auto count = read_pod<std::uint32_t>(in);
  std::vector<DecisionTree> trees(count);
  for (auto &t : trees) {
    const auto nodes = read_pod<std::uint32_t>(in);
    t.nodes().resize(nodes);
    for (auto &n : t.nodes()) {
      n.feature = read_pod<std::int32_t>(in);
      n.threshold = read_pod<double>(in);
      n.left = read_pod<std::int32_t>(in);
      n.right = read_pod<std::int32_t>(in);
      n.value = read_pod<std::uint8_t>(in) != 0;
    }
  }
  return ForestModel(std::move(trees), dimension, threshold);
}

ForestModel train_forest(std::span<const LabeledSample> data, const ForestConfig &cfg,
                         std::vector<std::vector<SplitTrace>> *traces) {
  if (cfg.n_trees < 1) throw Error(ErrorKind::ConfigInvalid, "forest.n_trees must be >= 1");
  if (cfg.min_samples_leaf < 1) throw Error(ErrorKind::ConfigInvalid, "forest.min_samples_leaf must be >= 1");
  if (data.size() < 2) throw Error(ErrorKind::DegenerateDataset, "need at least 2 samples");
  const std::size_t dimension = data.front().features.size();
  if (dimension == 0) throw Error(ErrorKind::DimensionMismatch, "samples have no features");
  std::size_t positives = 0;
  for (const auto &s : data) {
    if (s.features.size() != dimension) throw Error(ErrorKind::DimensionMismatch, "ragged feature vectors");
    positives += s.truth;
  }
  if ((positives == 0 || positives == data.size()) && !cfg.allow_degenerate)
    throw Error(ErrorKind::DegenerateDataset, "training data has a single class");
  if (cfg.features_per_split > dimension)
    throw Error(ErrorKind::ConfigInvalid, "features_per_split exceeds the feature count");

  if (traces) traces->assign(cfg.n_trees, {});
  std::vector<DecisionTree> trees;
  trees.reserve(cfg.n_trees);
  for (std::size_t t = 0; t < cfg.n_trees; ++t) {
    Rng rng(derive_seed(cfg.seed, t));
    std::vector<std::size_t> bootstrap(data.size());
    for (auto &b : bootstrap) b = rng.below(data.size());
    TreeBuilder builder(data, cfg, dimension, rng, traces ? &(*traces)[t] : nullptr);
    trees.push_back(builder.build(std::move(bootstrap)));
  }
  return ForestModel(std::move(trees), dimension, cfg.threshold);
}

} // namespace mimicry
