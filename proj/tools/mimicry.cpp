// Command-line driver: one subcommand per pipeline stage.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mimicry/error.hpp"
#include "mimicry/pipeline.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::size_t> jobs;
  std::optional<std::uint64_t> seed;
  std::string predictor;
  std::optional<std::size_t> k;
  std::vector<std::string> labels;
  bool verbose = false;
};

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Generate, execute and classify vulnerability-mimicking mutants"};
  app.require_subcommand(1);
  Flags flags;

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"abstract", "Tokenize and abstract the project sources"},
      {"mutate", "Generate mutants at every mask site"},
      {"run", "Run the test suite against each valid mutant"},
      {"label", "Compare mutant fail sets with the vulnerability"},
      {"embed-train", "Train the sequence embedder"},
      {"embed", "Embed annotated mutant sequences"},
      {"train", "Train the forest and cross-validate"},
      {"predict", "Score mutants with the trained forest"},
      {"report", "Summarize labels and classifier metrics"},
      {"pipeline", "Run all stages in order"},
  };
  for (const auto &[name, help] : commands) {
    auto *sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "JSON run configuration")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Artifact directory (overrides out_dir)");
    sub->add_option("--jobs", flags.jobs, "Parallel mutant executions")->check(CLI::PositiveNumber);
    sub->add_option("--seed", flags.seed, "Seed for the embedder, forest and folds");
    sub->add_option("--predictor", flags.predictor, "builtin or remote=<url>");
    sub->add_option("--k", flags.k, "Candidates per mask site")->check(CLI::PositiveNumber);
    sub->add_flag("-v,--verbose", flags.verbose, "Log progress");
    if (name == "report") sub->add_option("--labels", flags.labels, "Extra label JSONL files")->check(CLI::ExistingFile);
  }

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(flags.verbose ? spdlog::level::info : spdlog::level::warn);
  spdlog::set_pattern("%^%l%$: %v");
  const std::string stage = app.get_subcommands().front()->get_name();

  mimicry::RunConfig cfg;
  try {
    if (!flags.config.empty()) cfg = mimicry::load_run_config(flags.config);
    else if (stage != "report") throw mimicry::Error(mimicry::ErrorKind::ConfigInvalid, "--config is required");
    if (!flags.out.empty()) cfg.out_dir = std::filesystem::absolute(flags.out);
    if (flags.jobs) cfg.jobs = *flags.jobs;
    if (flags.seed) cfg.propagate_seed(*flags.seed);
    if (!flags.predictor.empty()) cfg.predictor = mimicry::parse_predictor(flags.predictor);
    if (flags.k) cfg.k = *flags.k;
    for (const auto &l : flags.labels) cfg.report_labels.push_back(std::filesystem::absolute(l));
  } catch (const mimicry::Error &e) {
    std::cerr << nlohmann::json{{"stage", stage}, {"exit_code", 2}, {"errors", {e.what()}}}.dump() << "\n";
    return mimicry::kExitValidation;
  }

  return mimicry::run_stage(stage, cfg).exit_code;
}
