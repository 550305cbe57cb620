#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <nlohmann/json.hpp>

#include "mimicry/abstraction.hpp"
#include "mimicry/embedder.hpp"
#include "mimicry/error.hpp"
#include "mimicry/forest.hpp"
#include "mimicry/lexer.hpp"
#include "mimicry/metrics.hpp"
#include "mimicry/mutant.hpp"
#include "mimicry/pipeline.hpp"
#include "mimicry/report.hpp"
#include "mimicry/semantics.hpp"

namespace py = pybind11;
using namespace mimicry;

namespace {

// Round-trips through the json module; the library already has to_json for
// every record it writes to disk.
py::object to_python(const nlohmann::json &j) { return py::module_::import("json").attr("loads")(j.dump()); }

std::vector<LabeledSample> samples(const std::vector<std::vector<double>> &features, const std::vector<bool> &truths,
                                   const std::vector<std::string> &groups) {
  if (features.size() != truths.size()) throw Error(ErrorKind::LengthMismatch, "features and truths differ in length");
  if (!groups.empty() && groups.size() != features.size())
    throw Error(ErrorKind::LengthMismatch, "groups and features differ in length");
  std::vector<LabeledSample> out;
  for (std::size_t i = 0; i < features.size(); ++i)
    out.push_back({std::to_string(i), groups.empty() ? "g" : groups[i], features[i], truths[i]});
  return out;
}

ForestConfig forest_config(std::size_t n_trees, std::size_t features_per_split, std::size_t min_samples_leaf,
                           std::uint64_t seed) {
  ForestConfig c;
  c.n_trees = n_trees;
  c.features_per_split = features_per_split;
  c.min_samples_leaf = min_samples_leaf;
  c.seed = seed;
  c.allow_degenerate = true;
  return c;
}

} // namespace

PYBIND11_MODULE(_mimicry, m) {
  m.doc() = "Vulnerability-mimicking mutant generation and classification";

  static py::exception<Error> error(m, "MimicryError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error &e) {
      py::set_error(error, e.what());
    }
  });

  m.def(
      "tokenize", [](std::string source) { return tokenize(std::move(source)).lexemes(); }, py::arg("source"),
      "Lexemes of a Java-like source file, comments dropped.");

  m.def(
      "abstract",
      [](std::string source, std::optional<std::set<std::string>> idioms) {
        return to_python(abstract(tokenize(std::move(source)), idioms.value_or(default_idioms())));
      },
      py::arg("source"), py::arg("idioms") = py::none(),
      "Abstracted tokens plus the symbol table that maps IDs back to lexemes.");

  m.def(
      "mutate",
      [](std::string source, const std::string &file, std::size_t k) {
        const auto ts = tokenize(std::move(source));
        BuiltinPredictor predictor;
        GenerateOptions opts;
        opts.file = file;
        opts.k = k;
        const auto report = generate_all(ts, predictor, opts, lexical_validator());
        py::list out;
        for (const auto &mutant : report.mutants) {
          auto entry = manifest_entry(mutant);
          entry["patched_source"] = mutant.patched_source;
          out.append(to_python(entry));
        }
        return out;
      },
      py::arg("source"), py::arg("file") = "Main.java", py::arg("k") = 5,
      "Mutants from the builtin predictor, one manifest record per mutant.");

  m.def(
      "ochiai",
      [](std::set<std::string> a, std::set<std::string> b) { return ochiai(FailSet{std::move(a)}, FailSet{std::move(b)}); },
      py::arg("a"), py::arg("b"));

  m.def(
      "label",
      [](std::set<std::string> fails, std::set<std::string> pov) {
        VulnerabilityRecord v;
        v.id = "vulnerability";
        v.pov = FailSet{std::move(pov)};
        return to_python(label(FailSet{std::move(fails)}, v));
      },
      py::arg("fails"), py::arg("pov"), "Label a mutant's failing tests against the PoV tests.");

  m.def(
      "evaluate",
      [](const std::vector<bool> &predictions, const std::vector<bool> &truths) {
        return to_python(evaluate(predictions, truths));
      },
      py::arg("predictions"), py::arg("truths"));

  m.def("format_percent", &format_percent, py::arg("part"), py::arg("whole"), py::arg("decimals") = 1);

  py::class_<EncoderDecoderModel>(m, "Embedder")
      .def("embed",
           [](const EncoderDecoderModel &model, const TokenSeq &seq) {
             const auto v = model.embed(seq);
             return std::vector<double>(v.data(), v.data() + v.size());
           })
      .def("reconstruction_accuracy",
           [](const EncoderDecoderModel &model, const std::vector<TokenSeq> &corpus) {
             return model.reconstruction_accuracy(corpus);
           })
      .def("loss", [](const EncoderDecoderModel &model, const TokenSeq &seq) { return model.loss(seq); })
      .def(
          "grad_check",
          [](const EncoderDecoderModel &model, const TokenSeq &sample, double epsilon) {
            return grad_check(model, sample, epsilon);
          },
          py::arg("sample"), py::arg("epsilon") = 1e-5)
      .def("save", &EncoderDecoderModel::save)
      .def_static("load", &EncoderDecoderModel::load)
      .def_property_readonly("vocab", [](const EncoderDecoderModel &model) { return model.vocab().tokens; });

  m.def(
      "train_embedder",
      [](const std::vector<TokenSeq> &corpus, std::size_t max_len, std::size_t embed_dim, std::size_t hidden_dim,
         std::size_t epochs, double learning_rate, std::uint64_t seed) {
        EmbedderConfig cfg;
        cfg.max_len = max_len;
        cfg.embed_dim = embed_dim;
        cfg.hidden_dim = hidden_dim;
        cfg.epochs = epochs;
        cfg.learning_rate = learning_rate;
        cfg.seed = seed;
        TrainingHistory history;
        auto model = train(corpus, cfg, &history);
        return py::make_tuple(std::move(model), history.epoch_loss);
      },
      py::arg("corpus"), py::arg("max_len") = 150, py::arg("embed_dim") = 64, py::arg("hidden_dim") = 128,
      py::arg("epochs") = 10, py::arg("learning_rate") = 0.2, py::arg("seed") = 1,
      "Returns (model, per-epoch mean loss).");

  py::class_<ForestModel>(m, "Forest")
      .def("predict",
           [](const ForestModel &f, const std::vector<double> &x) {
             const auto p = f.predict(x);
             return py::make_tuple(p.score, p.label);
           })
      .def_property_readonly("n_trees", [](const ForestModel &f) { return f.trees().size(); })
      .def("save", &ForestModel::save)
      .def_static("load", &ForestModel::load);

  m.def(
      "train_forest",
      [](const std::vector<std::vector<double>> &features, const std::vector<bool> &truths, std::size_t n_trees,
         std::size_t features_per_split, std::size_t min_samples_leaf, std::uint64_t seed) {
        return train_forest(samples(features, truths, {}),
                            forest_config(n_trees, features_per_split, min_samples_leaf, seed));
      },
      py::arg("features"), py::arg("truths"), py::arg("n_trees") = 100, py::arg("features_per_split") = 0,
      py::arg("min_samples_leaf") = 1, py::arg("seed") = 1);

  m.def(
      "cross_validate",
      [](const std::vector<std::vector<double>> &features, const std::vector<bool> &truths,
         const std::vector<std::string> &groups, std::size_t folds, std::uint64_t seed, std::size_t n_trees) {
        return to_python(cross_validate(samples(features, truths, groups), folds, seed, forest_config(n_trees, 0, 1, seed)));
      },
      py::arg("features"), py::arg("truths"), py::arg("groups"), py::arg("folds") = 5, py::arg("seed") = 1,
      py::arg("n_trees") = 100, "Grouped k-fold cross-validation; returns the metrics record.");

  m.def(
      "run_stage",
      [](const std::string &stage, const std::filesystem::path &config, std::optional<std::filesystem::path> out) {
        auto cfg = load_run_config(config);
        if (out) cfg.out_dir = std::filesystem::absolute(*out);
        StageResult r;
        {
          py::gil_scoped_release release;
          r = run_stage(stage, cfg);
        }
        return py::make_tuple(r.exit_code, r.errors);
      },
      py::arg("stage"), py::arg("config"), py::arg("out") = py::none(),
      "Runs one pipeline stage; returns (exit_code, errors).");
}
