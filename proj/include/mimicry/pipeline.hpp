#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mimicry/embedder.hpp"
#include "mimicry/forest.hpp"
#include "mimicry/harness.hpp"
#include "mimicry/semantics.hpp"

namespace mimicry {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitPartial = 3 };

struct PredictorChoice {
  bool remote = false;
  std::string url;
  int timeout_ms = 10000;
};

/// Parses "builtin" or "remote=<url>". Throws ConfigInvalid.
PredictorChoice parse_predictor(const std::string &spec);

struct RunConfig {
  ProjectConfig project;
  VulnerabilityRecord vulnerability;
  PredictorChoice predictor;
  std::size_t k = 5;
  bool mask_on_abstracted = false;
  std::size_t max_len = 150;
  EmbedderConfig embedder;
  ForestConfig forest;
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  /// Extra LabeledSample JSONL files (other projects) for training and CV.
  std::vector<std::filesystem::path> datasets;
  /// Extra label JSONL files (other projects) for the report.
  std::vector<std::filesystem::path> report_labels;
  std::filesystem::path out_dir;
  std::size_t jobs = 1;

  /// Copies `seed` into the embedder, forest and fold assignment.
  void propagate_seed(std::uint64_t s);
  void validate() const;
};

/// Reads the JSON config; relative paths resolve against the file's directory.
/// Throws ConfigInvalid.
RunConfig load_run_config(const std::filesystem::path &path);

struct StageResult {
  explicit StageResult(std::string name = {}) : stage(std::move(name)) {}

  std::string stage;
  int exit_code = kExitOk;
  std::vector<std::string> errors;

  void fail(int code, std::string message);
};

// Artifact names under out_dir.
inline constexpr const char *kAbstractFile = "abstract.jsonl";
inline constexpr const char *kManifestFile = "mutate.manifest.jsonl";
inline constexpr const char *kSequencesFile = "mutate.sequences.jsonl";
inline constexpr const char *kBaselineFile = "run.baseline.json";
inline constexpr const char *kResultsFile = "run.results.jsonl";
inline constexpr const char *kLabelsFile = "label.labels.jsonl";
inline constexpr const char *kModelFile = "embed.model.bin";
inline constexpr const char *kEmbeddingsFile = "embed.embeddings.jsonl";
inline constexpr const char *kDatasetFile = "train.dataset.jsonl";
inline constexpr const char *kForestFile = "train.forest.bin";
inline constexpr const char *kMetricsFile = "train.metrics.json";
inline constexpr const char *kCvPredictionsFile = "train.predictions.csv";
inline constexpr const char *kPredictionsFile = "predict.predictions.csv";
inline constexpr const char *kReportMarkdown = "report.md";
inline constexpr const char *kReportJson = "report.json";

StageResult stage_abstract(const RunConfig &cfg);
StageResult stage_mutate(const RunConfig &cfg);
StageResult stage_run(const RunConfig &cfg);
StageResult stage_label(const RunConfig &cfg);
StageResult stage_embed_train(const RunConfig &cfg);
StageResult stage_embed(const RunConfig &cfg);
StageResult stage_train(const RunConfig &cfg);
StageResult stage_predict(const RunConfig &cfg);
StageResult stage_report(const RunConfig &cfg);
/// All stages in order; stops at the first validation failure.
StageResult stage_pipeline(const RunConfig &cfg);

/// Runs a stage by name ("abstract", "mutate", ..., "pipeline"), converting
/// library errors into exit codes and writing `<stage>.errors.json` on failure.
StageResult run_stage(const std::string &name, const RunConfig &cfg);

/// Loads LabeledSample JSONL ({mutant_id, group_id, features, truth}).
std::vector<LabeledSample> load_dataset(const std::filesystem::path &path);

} // namespace mimicry
