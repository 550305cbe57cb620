#include "mimicry/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mimicry/abstraction.hpp"
#include "mimicry/error.hpp"
#include "mimicry/lexer.hpp"
#include "mimicry/metrics.hpp"
#include "mimicry/mutant.hpp"
#include "mimicry/predictor.hpp"
#include "mimicry/report.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace mimicry {

namespace {

std::string read_file(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorKind::FileMissing, p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path &p, const std::string &text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  out << text;
  if (!out) throw Error(ErrorKind::Io, "short write to " + p.string());
}

void write_jsonl(const fs::path &p, const std::vector<json> &lines) {
  std::string text;
  for (const auto &l : lines) text += l.dump() + "\n";
  write_file(p, text);
}

fs::path upstream(const RunConfig &cfg, const char *name) {
  fs::path p = cfg.out_dir / name;
  if (!fs::exists(p)) throw Error(ErrorKind::MissingUpstreamArtifact, p.string());
  return p;
}

std::vector<json> read_jsonl(const fs::path &p) {
  std::ifstream in(p);
  if (!in) throw Error(ErrorKind::MissingUpstreamArtifact, p.string());
  std::vector<json> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception &e) {
      throw Error(ErrorKind::ConfigInvalid, fmt::format("{}:{}: {}", p.string(), n, e.what()));
    }
  }
  return out;
}

json read_json(const fs::path &p) {
  try {
    return json::parse(read_file(p));
  } catch (const json::exception &e) {
    throw Error(ErrorKind::ConfigInvalid, p.string() + ": " + e.what());
  }
}

std::string csv_field(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void require_project(const RunConfig &cfg) {
  if (cfg.project.root.empty()) throw Error(ErrorKind::ConfigInvalid, "config has no project");
  cfg.project.validate();
}

void require_out(const RunConfig &cfg) {
  if (cfg.out_dir.empty()) throw Error(ErrorKind::ConfigInvalid, "no out_dir");
  fs::create_directories(cfg.out_dir);
}

struct ManifestRecord {
  Mutant mutant;
  json entry;
};

std::vector<ManifestRecord> load_manifest(const RunConfig &cfg) {
  std::vector<ManifestRecord> out;
  for (auto &e : read_jsonl(upstream(cfg, kManifestFile))) {
    Mutant m;
    m.id = e.at("id").get<std::string>();
    m.file = e.at("file").get<std::string>();
    m.site.token_index = e.at("token_index").get<std::size_t>();
    m.site.site_kind = site_kind_from_string(e.at("site_kind").get<std::string>());
    m.site.original = e.at("original").get<std::string>();
    m.replacement = e.at("replacement").get<std::string>();
    m.operator_tag = operator_tag_from_string(e.at("operator_tag").get<std::string>());
    m.valid = e.at("valid").get<bool>();
    out.push_back({std::move(m), std::move(e)});
  }
  return out;
}

std::map<std::string, TokenSeq> load_sequences(const RunConfig &cfg) {
  std::map<std::string, TokenSeq> out;
  for (const auto &e : read_jsonl(upstream(cfg, kSequencesFile)))
    out[e.at("mutant_id").get<std::string>()] = e.at("sequence").get<TokenSeq>();
  return out;
}

// Sequences are stored at generation length; re-centre on the annotation when
// the embedder takes fewer tokens.
TokenSeq fit_sequence(const TokenSeq &seq, std::size_t max_len) {
  if (seq.size() <= max_len) return seq;
  std::size_t at = 0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    if (seq[i].size() > 1 && seq[i][0] == '@') {
      at = i;
      break;
    }
  return window(seq, at, max_len);
}

std::vector<TokenSeq> valid_sequences(const RunConfig &cfg, std::vector<std::string> *ids) {
  const auto manifest = load_manifest(cfg);
  const auto seqs = load_sequences(cfg);
  std::vector<TokenSeq> out;
  for (const auto &r : manifest) {
    if (!r.mutant.valid) continue;
    auto it = seqs.find(r.mutant.id);
    if (it == seqs.end())
      throw Error(ErrorKind::MissingUpstreamArtifact, "no sequence for mutant " + r.mutant.id);
    out.push_back(fit_sequence(it->second, cfg.embedder.max_len));
    if (ids) ids->push_back(r.mutant.id);
  }
  return out;
}

std::map<std::string, std::vector<double>> load_embeddings(const RunConfig &cfg) {
  std::map<std::string, std::vector<double>> out;
  for (const auto &e : read_jsonl(upstream(cfg, kEmbeddingsFile)))
    out[e.at("mutant_id").get<std::string>()] = e.at("vector").get<std::vector<double>>();
  return out;
}

std::map<std::string, MutantLabel> load_labels(const fs::path &p) {
  std::map<std::string, MutantLabel> out;
  for (const auto &e : read_jsonl(p)) {
    auto l = e.get<MutantLabel>();
    out[l.mutant_id] = l;
  }
  return out;
}

std::string number(double v) { return fmt::format("{}", v); }

json test_run_json(const TestRun &run) {
  json j = result_entry("", run);
  j.erase("mutant_id");
  if (run.error) j["error"] = *run.error;
  return j;
}

} // namespace

PredictorChoice parse_predictor(const std::string &spec) {
  PredictorChoice c;
  if (spec == "builtin") return c;
  constexpr std::string_view prefix = "remote=";
  if (spec.starts_with(prefix) && spec.size() > prefix.size()) {
    c.remote = true;
    c.url = spec.substr(prefix.size());
    return c;
  }
  throw Error(ErrorKind::ConfigInvalid, "predictor must be builtin or remote=<url>, got '" + spec + "'");
}

void RunConfig::propagate_seed(std::uint64_t s) {
  seed = s;
  embedder.seed = s;
  forest.seed = s;
}

void RunConfig::validate() const {
  if (k == 0) throw Error(ErrorKind::ConfigInvalid, "k must be positive");
  if (max_len == 0) throw Error(ErrorKind::ConfigInvalid, "max_len must be positive");
  if (folds < 2) throw Error(ErrorKind::ConfigInvalid, "folds must be at least 2");
  if (jobs == 0) throw Error(ErrorKind::ConfigInvalid, "jobs must be positive");
  if (predictor.remote && predictor.url.empty()) throw Error(ErrorKind::ConfigInvalid, "remote predictor needs a url");
  embedder.validate();
  for (const auto &p : datasets)
    if (!fs::exists(p)) throw Error(ErrorKind::ConfigInvalid, "dataset not found: " + p.string());
  for (const auto &p : report_labels)
    if (!fs::exists(p)) throw Error(ErrorKind::ConfigInvalid, "label file not found: " + p.string());
  if (!project.root.empty()) {
    if (!fs::is_directory(project.root))
      throw Error(ErrorKind::ConfigInvalid, "project root not found: " + project.root.string());
    for (const auto &s : project.sources)
      if (!fs::exists(project.root / s)) throw Error(ErrorKind::ConfigInvalid, "source not found: " + s);
  }
}

RunConfig load_run_config(const fs::path &path) {
  const json j = read_json(path);
  const fs::path base = fs::absolute(path).parent_path();
  const auto resolve = [&](const std::string &p) { return fs::path(p).is_absolute() ? fs::path(p) : base / p; };

  RunConfig cfg;
  try {
    if (j.contains("project")) {
      cfg.project = j["project"].get<ProjectConfig>();
      cfg.project.root = resolve(cfg.project.root.string());
    }
    if (j.contains("vulnerability")) cfg.vulnerability = j["vulnerability"].get<VulnerabilityRecord>();
    if (j.contains("vulnerability_file"))
      cfg.vulnerability = read_json(resolve(j["vulnerability_file"].get<std::string>())).get<VulnerabilityRecord>();
    if (j.contains("predictor")) cfg.predictor = parse_predictor(j["predictor"].get<std::string>());
    cfg.predictor.timeout_ms = j.value("predictor_timeout_ms", cfg.predictor.timeout_ms);
    if (j.contains("generator")) {
      const auto &g = j["generator"];
      cfg.k = g.value("k", cfg.k);
      cfg.mask_on_abstracted = g.value("mask_on_abstracted", cfg.mask_on_abstracted);
      cfg.max_len = g.value("max_len", cfg.max_len);
    }
    if (j.contains("embedder")) {
      const auto &e = j["embedder"];
      auto &c = cfg.embedder;
      c.max_len = e.value("max_len", c.max_len);
      c.embed_dim = e.value("embed_dim", c.embed_dim);
      c.hidden_dim = e.value("hidden_dim", c.hidden_dim);
      c.epochs = e.value("epochs", c.epochs);
      c.learning_rate = e.value("learning_rate", c.learning_rate);
      c.vocab_size = e.value("vocab_size", c.vocab_size);
      c.clip_norm = e.value("clip_norm", c.clip_norm);
      c.seed = e.value("seed", c.seed);
    }
    if (j.contains("forest")) {
      const auto &f = j["forest"];
      auto &c = cfg.forest;
      c.n_trees = f.value("n_trees", c.n_trees);
      c.features_per_split = f.value("features_per_split", c.features_per_split);
      c.min_samples_leaf = f.value("min_samples_leaf", c.min_samples_leaf);
      c.allow_degenerate = f.value("allow_degenerate", c.allow_degenerate);
      c.threshold = f.value("threshold", c.threshold);
      c.seed = f.value("seed", c.seed);
    }
    if (j.contains("eval")) {
      const auto &e = j["eval"];
      cfg.folds = e.value("folds", cfg.folds);
      cfg.seed = e.value("seed", cfg.seed);
      for (const auto &d : e.value("datasets", std::vector<std::string>{})) cfg.datasets.push_back(resolve(d));
    }
    if (j.contains("report"))
      for (const auto &l : j["report"].value("labels", std::vector<std::string>{}))
        cfg.report_labels.push_back(resolve(l));
    if (j.contains("out_dir")) cfg.out_dir = resolve(j["out_dir"].get<std::string>());
    cfg.jobs = j.value("jobs", cfg.jobs);
    if (j.contains("seed")) cfg.propagate_seed(j["seed"].get<std::uint64_t>());
  } catch (const json::exception &e) {
    throw Error(ErrorKind::ConfigInvalid, path.string() + ": " + e.what());
  }
  return cfg;
}

void StageResult::fail(int code, std::string message) {
  exit_code = std::max(exit_code, code);
  errors.push_back(std::move(message));
}

StageResult stage_abstract(const RunConfig &cfg) {
  require_project(cfg);
  require_out(cfg);
  StageResult r{"abstract"};
  std::vector<json> lines;
  for (const auto &file : cfg.project.sources) {
    const auto unit = abstract(tokenize(read_file(cfg.project.root / file)));
    json j = unit;
    j["file"] = file;
    lines.push_back(std::move(j));
  }
  write_jsonl(cfg.out_dir / kAbstractFile, lines);
  return r;
}

StageResult stage_mutate(const RunConfig &cfg) {
  require_project(cfg);
  require_out(cfg);
  StageResult r{"mutate"};

  std::unique_ptr<Predictor> predictor;
  if (cfg.predictor.remote)
    predictor = std::make_unique<RemotePredictor>(cfg.predictor.url, cfg.predictor.timeout_ms);
  else
    predictor = std::make_unique<BuiltinPredictor>();
  const Validator validator = cfg.project.validator_command.empty()
                                  ? lexical_validator()
                                  : command_validator(cfg.project.validator_command, cfg.project.per_test_timeout_s);

  std::vector<Mutant> mutants;
  for (const auto &file : cfg.project.sources) {
    GenerateOptions opts;
    opts.file = file;
    opts.k = cfg.k;
    opts.mask_on_abstracted = cfg.mask_on_abstracted;
    opts.max_len = cfg.max_len;
    auto report = generate_all(tokenize(read_file(cfg.project.root / file)), *predictor, opts, validator);
    for (const auto &s : report.skipped)
      r.fail(kExitPartial, fmt::format("{}: site at token {} skipped: {}", file, s.token_index, s.reason));
    std::ranges::move(report.mutants, std::back_inserter(mutants));
  }
  std::ranges::sort(mutants, {}, &Mutant::id);

  std::vector<json> manifest, sequences;
  for (const auto &m : mutants) {
    manifest.push_back(manifest_entry(m));
    sequences.push_back({{"mutant_id", m.id}, {"sequence", m.annotated_sequence}});
    write_file(cfg.out_dir / m.id / m.file, m.patched_source);
  }
  write_jsonl(cfg.out_dir / kManifestFile, manifest);
  write_jsonl(cfg.out_dir / kSequencesFile, sequences);
  spdlog::info("mutate: {} mutants ({} valid)", mutants.size(),
               std::ranges::count_if(mutants, [](const Mutant &m) { return m.valid; }));
  return r;
}

StageResult stage_run(const RunConfig &cfg) {
  require_project(cfg);
  require_out(cfg);
  StageResult r{"run"};

  std::vector<Mutant> mutants;
  for (auto &rec : load_manifest(cfg)) {
    if (!rec.mutant.valid) continue;
    const fs::path patched = cfg.out_dir / rec.mutant.id / rec.mutant.file;
    if (!fs::exists(patched)) throw Error(ErrorKind::MissingUpstreamArtifact, patched.string());
    rec.mutant.patched_source = read_file(patched);
    mutants.push_back(std::move(rec.mutant));
  }

  {
    TempDir ws("mimicry-base");
    clone_workspace(cfg.project.root, ws.path());
    const TestRun base = run_tests(ws.path(), cfg.project);
    if (!failset(base).empty())
      r.fail(kExitPartial, fmt::format("baseline fails {} test(s); labels will be unreliable", failset(base).size()));
    write_file(cfg.out_dir / kBaselineFile, test_run_json(base).dump(2) + "\n");
  }

  std::vector<std::optional<json>> results(mutants.size());
  std::mutex error_mutex;
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < mutants.size(); i = next++) {
      const Mutant &m = mutants[i];
      try {
        TempDir ws("mimicry-run");
        clone_workspace(cfg.project.root, ws.path());
        apply_mutant(ws.path(), m);
        results[i] = result_entry(m.id, run_tests(ws.path(), cfg.project));
      } catch (const Error &e) {
        std::lock_guard lock(error_mutex);
        r.fail(kExitPartial, m.id + ": " + e.what());
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    const std::size_t n = std::min(cfg.jobs, std::max<std::size_t>(mutants.size(), 1));
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }
  std::ranges::sort(r.errors);

  std::vector<json> lines;
  for (auto &res : results)
    if (res) lines.push_back(std::move(*res));
  write_jsonl(cfg.out_dir / kResultsFile, lines);
  spdlog::info("run: {} of {} mutants executed", lines.size(), mutants.size());
  return r;
}

StageResult stage_label(const RunConfig &cfg) {
  require_out(cfg);
  StageResult r{"label"};
  const auto results = read_jsonl(upstream(cfg, kResultsFile));
  std::vector<json> lines;
  for (const auto &e : results) {
    FailSet fs;
    for (const auto &t : e.at("fail_tests")) fs.tests.insert(t.get<std::string>());
    json j = label(fs, cfg.vulnerability, e.at("mutant_id").get<std::string>());
    j["project"] = cfg.vulnerability.id;
    lines.push_back(std::move(j));
  }
  write_jsonl(cfg.out_dir / kLabelsFile, lines);
  return r;
}

StageResult stage_embed_train(const RunConfig &cfg) {
  require_out(cfg);
  StageResult r{"embed-train"};
  const auto corpus = valid_sequences(cfg, nullptr);
  TrainingHistory history;
  const auto model = train(corpus, cfg.embedder, &history);
  model.save(cfg.out_dir / kModelFile);
  json j = {{"sequences", corpus.size()},
            {"vocab", model.vocab().size()},
            {"epoch_loss", history.epoch_loss},
            {"reconstruction_accuracy", model.reconstruction_accuracy(corpus)}};
  write_file(cfg.out_dir / "embed.training.json", j.dump(2) + "\n");
  return r;
}

StageResult stage_embed(const RunConfig &cfg) {
  require_out(cfg);
  StageResult r{"embed"};
  const auto model = EncoderDecoderModel::load(upstream(cfg, kModelFile));
  std::vector<std::string> ids;
  const auto corpus = valid_sequences(cfg, &ids);
  std::vector<json> lines;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const Eigen::VectorXd v = model.embed(corpus[i]);
    lines.push_back({{"mutant_id", ids[i]}, {"vector", std::vector<double>(v.data(), v.data() + v.size())}});
  }
  write_jsonl(cfg.out_dir / kEmbeddingsFile, lines);
  return r;
}

StageResult stage_train(const RunConfig &cfg) {
  require_out(cfg);
  StageResult r{"train"};
  const auto embeddings = load_embeddings(cfg);
  const auto labels = load_labels(upstream(cfg, kLabelsFile));

  std::vector<LabeledSample> data;
  std::vector<json> lines;
  for (const auto &[id, vec] : embeddings) {
    auto it = labels.find(id);
    if (it == labels.end()) continue;
    LabeledSample s{id, cfg.vulnerability.id, vec, it->second.label == LabelKind::Mimicking};
    lines.push_back({{"mutant_id", s.mutant_id}, {"group_id", s.group_id}, {"features", s.features}, {"truth", s.truth}});
    data.push_back(std::move(s));
  }
  write_jsonl(cfg.out_dir / kDatasetFile, lines);
  for (const auto &p : cfg.datasets) std::ranges::move(load_dataset(p), std::back_inserter(data));
  if (data.empty()) throw Error(ErrorKind::EmptyCorpus, "no labelled embeddings to train on");

  train_forest(data, cfg.forest).save(cfg.out_dir / kForestFile);

  std::set<std::string> groups;
  for (const auto &s : data) groups.insert(s.group_id);
  json metrics;
  std::string csv = "mutant_id,group_id,score,label,truth\n";
  if (groups.size() >= cfg.folds) {
    const auto cv = cross_validate(data, cfg.folds, cfg.seed, cfg.forest);
    metrics = cv;
    for (const auto &p : cv.predictions)
      csv += fmt::format("{},{},{},{},{}\n", csv_field(p.mutant_id), csv_field(p.group_id), number(p.score),
                         int(p.label), int(p.truth));
  } else {
    metrics["skipped"] =
        fmt::format("{} group(s) cannot fill {} folds; add datasets from other projects", groups.size(), cfg.folds);
  }
  metrics["samples"] = data.size();
  metrics["groups"] = groups.size();
  write_file(cfg.out_dir / kMetricsFile, metrics.dump(2) + "\n");
  write_file(cfg.out_dir / kCvPredictionsFile, csv);
  return r;
}

StageResult stage_predict(const RunConfig &cfg) {
  require_out(cfg);
  StageResult r{"predict"};
  const auto forest = ForestModel::load(upstream(cfg, kForestFile));
  const auto embeddings = load_embeddings(cfg);
  std::map<std::string, MutantLabel> labels;
  if (fs::exists(cfg.out_dir / kLabelsFile)) labels = load_labels(cfg.out_dir / kLabelsFile);

  std::string csv = "mutant_id,score,label,truth\n";
  for (const auto &[id, vec] : embeddings) {
    const auto p = forest.predict(vec);
    std::string truth;
    if (auto it = labels.find(id); it != labels.end()) truth = it->second.label == LabelKind::Mimicking ? "1" : "0";
    csv += fmt::format("{},{},{},{}\n", csv_field(id), number(p.score), int(p.label), truth);
  }
  write_file(cfg.out_dir / kPredictionsFile, csv);
  return r;
}

StageResult stage_report(const RunConfig &cfg) {
  require_out(cfg);
  StageResult r{"report"};
  std::vector<ProjectLabel> labels;
  const auto add = [&](const fs::path &p, bool own) {
    for (const auto &e : read_jsonl(p)) {
      std::string project = e.value("project", own ? cfg.vulnerability.id : p.stem().string());
      labels.push_back({std::move(project), e.get<MutantLabel>()});
    }
  };
  const bool own = fs::exists(cfg.out_dir / kLabelsFile);
  if (own) add(cfg.out_dir / kLabelsFile, true);
  for (const auto &p : cfg.report_labels) add(p, false);
  if (!own && cfg.report_labels.empty()) throw Error(ErrorKind::MissingUpstreamArtifact, (cfg.out_dir / kLabelsFile).string());

  auto summary = summarize(count_labels(labels));
  summary.histogram = ochiai_histogram(labels);
  if (fs::exists(cfg.out_dir / kMetricsFile)) summary.classifier = read_json(cfg.out_dir / kMetricsFile);
  write_file(cfg.out_dir / kReportMarkdown, render_markdown(summary));
  write_file(cfg.out_dir / kReportJson, render_json(summary).dump(2) + "\n");
  return r;
}

namespace {

using StageFn = StageResult (*)(const RunConfig &);

const std::vector<std::pair<std::string, StageFn>> &stages() {
  static const std::vector<std::pair<std::string, StageFn>> table = {
      {"abstract", stage_abstract}, {"mutate", stage_mutate}, {"run", stage_run},
      {"label", stage_label},       {"embed-train", stage_embed_train}, {"embed", stage_embed},
      {"train", stage_train},       {"predict", stage_predict},   {"report", stage_report},
  };
  return table;
}

StageResult guarded(const std::string &name, StageFn fn, const RunConfig &cfg) {
  try {
    return fn(cfg);
  } catch (const Error &e) {
    StageResult r{name};
    r.fail(kExitValidation, e.what());
    return r;
  } catch (const json::exception &e) {
    StageResult r{name};
    r.fail(kExitValidation, std::string("ConfigInvalid: ") + e.what());
    return r;
  } catch (const fs::filesystem_error &e) {
    StageResult r{name};
    r.fail(kExitValidation, std::string("Io: ") + e.what());
    return r;
  }
}

} // namespace

StageResult stage_pipeline(const RunConfig &cfg) {
  StageResult total{"pipeline"};
  for (const auto &[name, fn] : stages()) {
    spdlog::info("stage {}", name);
    auto r = guarded(name, fn, cfg);
    for (auto &e : r.errors) total.fail(r.exit_code, name + ": " + e);
    if (r.exit_code == kExitValidation) break;
  }
  return total;
}

StageResult run_stage(const std::string &name, const RunConfig &cfg) {
  StageResult r{name};
  try {
    cfg.validate();
    if (name == "pipeline") {
      r = stage_pipeline(cfg);
    } else {
      auto it = std::ranges::find(stages(), name, &std::pair<std::string, StageFn>::first);
      if (it == stages().end()) throw Error(ErrorKind::ConfigInvalid, "unknown stage '" + name + "'");
      r = guarded(name, it->second, cfg);
    }
  } catch (const Error &e) {
    r.fail(kExitValidation, e.what());
  }

  const fs::path err_file = cfg.out_dir.empty() ? fs::path() : cfg.out_dir / (name + ".errors.json");
  if (r.exit_code != kExitOk) {
    const json summary = {{"stage", name}, {"exit_code", r.exit_code}, {"errors", r.errors}};
    std::cerr << summary.dump() << "\n";
    if (!err_file.empty()) {
      std::error_code ec;
      fs::create_directories(cfg.out_dir, ec);
      if (!ec) write_file(err_file, summary.dump(2) + "\n");
    }
  } else if (!err_file.empty()) {
    std::error_code ec;
    fs::remove(err_file, ec);
  }
  return r;
}

std::vector<LabeledSample> load_dataset(const fs::path &path) {
  std::vector<LabeledSample> out;
  for (const auto &e : read_jsonl(path))
    out.push_back({e.at("mutant_id").get<std::string>(), e.at("group_id").get<std::string>(),
                   e.at("features").get<std::vector<double>>(), e.at("truth").get<bool>()});
  return out;
}

} // namespace mimicry
