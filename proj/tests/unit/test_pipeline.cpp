#include <doctest.h>

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "mimicry/error.hpp"
#include "mimicry/pipeline.hpp"
#include "mimicry/process.hpp"

using namespace mimicry;
namespace fs = std::filesystem;

namespace {

const fs::path kFixture = fs::path(MIMICRY_FIXTURE_DIR) / "recordcopy";

std::string read(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig fixture_config(const fs::path &out) {
  auto cfg = load_run_config(kFixture / "config.json");
  cfg.out_dir = out;
  cfg.k = 2;
  cfg.embedder.epochs = 1;
  cfg.forest.n_trees = 5;
  return cfg;
}

} // namespace

TEST_CASE("predictor choice parsing") {
  CHECK_FALSE(parse_predictor("builtin").remote);
  const auto r = parse_predictor("remote=http://localhost:8080/lm");
  CHECK(r.remote);
  CHECK(r.url == "http://localhost:8080/lm");
  CHECK_THROWS_AS(parse_predictor("remote="), Error);
  CHECK_THROWS_AS(parse_predictor("bert"), Error);
}

TEST_CASE("config loading resolves relative paths") {
  const auto cfg = load_run_config(kFixture / "config.json");
  CHECK(cfg.project.root == kFixture / "project");
  CHECK(cfg.out_dir == kFixture / "out");
  CHECK(cfg.vulnerability.id == "RECORD-2024-0001");
  CHECK(cfg.vulnerability.pov.tests == std::set<std::string>{"oversize_record"});
  CHECK(cfg.project.sources == std::vector<std::string>{"record.c"});
  CHECK(cfg.embedder.embed_dim == 32);
  CHECK(cfg.forest.n_trees == 25);
  CHECK(cfg.jobs == 2);
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("seed propagation") {
  RunConfig cfg;
  cfg.propagate_seed(77);
  CHECK(cfg.seed == 77);
  CHECK(cfg.embedder.seed == 77);
  CHECK(cfg.forest.seed == 77);
}

TEST_CASE("bad configs") {
  TempDir dir;
  std::ofstream(dir.path() / "c.json") << "{ not json";
  CHECK_THROWS_AS(load_run_config(dir.path() / "c.json"), Error);
  std::ofstream(dir.path() / "d.json") << R"({"predictor": "gpt"})";
  CHECK_THROWS_AS(load_run_config(dir.path() / "d.json"), Error);
  std::ofstream(dir.path() / "e.json") << R"J({"project": {"root": "nowhere", "test_command": "true",
      "result_parser": {"kind": "regex", "pattern": "(x)"}}})J";
  const auto cfg = load_run_config(dir.path() / "e.json");
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("missing upstream artifacts fail validation") {
  TempDir out;
  auto cfg = fixture_config(out.path());
  for (const char *stage : {"run", "label", "embed-train", "embed", "train", "predict", "report"}) {
    const auto r = run_stage(stage, cfg);
    CHECK(r.exit_code == kExitValidation);
    REQUIRE_FALSE(r.errors.empty());
    CHECK(r.errors[0].find("MissingUpstreamArtifact") != std::string::npos);
    const auto summary = nlohmann::json::parse(read(out.path() / (std::string(stage) + ".errors.json")));
    CHECK(summary["exit_code"] == 2);
  }
  CHECK(run_stage("explode", cfg).exit_code == kExitValidation);
}

TEST_CASE("empty label manifest gives an empty report") {
  TempDir out;
  RunConfig cfg;
  cfg.out_dir = out.path();
  std::ofstream(out.path() / kLabelsFile) << "";
  const auto r = run_stage("report", cfg);
  CHECK(r.exit_code == kExitOk);
  const auto j = nlohmann::json::parse(read(out.path() / kReportJson));
  CHECK(j["projects"].empty());
  CHECK(j["total_mutants"] == 0);
  CHECK(fs::exists(out.path() / kReportMarkdown));
}

TEST_CASE("pipeline equals the stages run in order") {
  TempDir a, b;
  const auto cfg_a = fixture_config(a.path());
  const auto cfg_b = fixture_config(b.path());
  const auto whole = run_stage("pipeline", cfg_a);
  CHECK(whole.exit_code == kExitOk);
  for (const char *stage : {"abstract", "mutate", "run", "label", "embed-train", "embed", "train", "predict", "report"})
    CHECK(run_stage(stage, cfg_b).exit_code == kExitOk);

  for (const char *f : {kAbstractFile, kManifestFile, kSequencesFile, kLabelsFile, kModelFile, kEmbeddingsFile,
                        kDatasetFile, kForestFile, kMetricsFile, kPredictionsFile, kReportMarkdown, kReportJson}) {
    INFO(f);
    REQUIRE(fs::exists(a.path() / f));
    CHECK(read(a.path() / f) == read(b.path() / f));
  }

  // Results differ only in wall time.
  const auto strip = [](const fs::path &p) {
    std::string out;
    std::ifstream in(p);
    for (std::string line; std::getline(in, line);) {
      auto j = nlohmann::json::parse(line);
      j.erase("wall_time_s");
      out += j.dump() + "\n";
    }
    return out;
  };
  CHECK(strip(a.path() / kResultsFile) == strip(b.path() / kResultsFile));

  // Re-running a stage rewrites identical bytes.
  const auto before = read(b.path() / kManifestFile);
  CHECK(run_stage("mutate", cfg_b).exit_code == kExitOk);
  CHECK(read(b.path() / kManifestFile) == before);

  bool mimicking = false;
  std::ifstream labels(a.path() / kLabelsFile);
  for (std::string line; std::getline(labels, line);) {
    const auto j = nlohmann::json::parse(line);
    mimicking |= j["label"] == "mimicking" && j["ochiai"] == 1.0;
  }
  CHECK(mimicking);
}

TEST_CASE("extra datasets enable cross-validation") {
  TempDir out;
  std::ofstream ds(out.path() / "other.jsonl");
  for (int g = 0; g < 6; ++g)
    for (int i = 0; i < 6; ++i)
      ds << nlohmann::json{{"mutant_id", "o" + std::to_string(g) + "_" + std::to_string(i)},
                           {"group_id", "G" + std::to_string(g)},
                           {"features", {double(i), double(g)}},
                           {"truth", i > 2}}
                .dump()
         << "\n";
  ds.close();
  const auto data = load_dataset(out.path() / "other.jsonl");
  CHECK(data.size() == 36);
  CHECK(data[5].truth);
  CHECK(data[5].group_id == "G0");
}
