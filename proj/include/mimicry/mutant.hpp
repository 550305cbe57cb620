#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mimicry/abstraction.hpp"
#include "mimicry/lexer.hpp"
#include "mimicry/predictor.hpp"

namespace mimicry {

enum class OperatorTag { BinaryOperatorMutator, IdentifierMutator, FieldAccessMutator, LiteralMutator };

std::string_view to_string(OperatorTag tag) noexcept;
OperatorTag operator_tag_for(SiteKind kind) noexcept;
OperatorTag operator_tag_from_string(std::string_view name);

struct MaskSite {
  std::size_t token_index = 0;
  SiteKind site_kind = SiteKind::Identifier;
  std::string original;
  /// Token index range [begin, end) of the enclosing statement.
  std::size_t statement_begin = 0;
  std::size_t statement_end = 0;
};

struct Mutant {
  std::string id;
  std::string file;
  MaskSite site;
  std::string replacement;
  OperatorTag operator_tag = OperatorTag::IdentifierMutator;
  std::string patched_source;
  std::vector<std::string> annotated_sequence;
  bool valid = false;
};

/// Binary operators eligible as mask sites.
bool is_mutable_binary_operator(std::string_view op) noexcept;

/// Sites in token order: identifiers (type names, declarations of methods and
/// package/import paths excluded), names after `.`, binary operators between
/// two operands, and literals.
std::vector<MaskSite> enumerate_sites(const TokenStream &ts);

/// `path@index@replacement`, with path and replacement percent-encoded so the
/// key is usable as a directory name.
std::string mutant_id(std::string_view file, std::size_t token_index, std::string_view replacement);

/// Returns true when the mutant is acceptable (compiles, lexes, ...).
using Validator = std::function<bool(const Mutant &)>;

/// Accepts any mutant whose patched source lexes.
Validator lexical_validator();

/// Writes the patched source to a scratch directory under its original file
/// name and runs `command` with `{file}` replaced by that path; exit 0 is valid.
Validator command_validator(std::string command, double timeout_s = 120.0);

struct GenerateOptions {
  std::string file;
  std::size_t k = 5;
  /// Query the predictor with abstracted tokens instead of raw lexemes.
  bool mask_on_abstracted = false;
  std::set<std::string> idioms = default_idioms();
  std::size_t max_len = 150;
};

/// Up to `k` mutants for one site. Candidates equal to the original, repeated
/// candidates, and candidates that do not re-lex as exactly one token in place
/// are dropped. Throws PredictorUnavailable / MalformedResponse from the
/// predictor unchanged.
std::vector<Mutant> generate(const TokenStream &ts, const MaskSite &site, Predictor &predictor,
                             const GenerateOptions &opts, const Validator &validator);

/// Abstracted token sequence of the mutated source with `@<tag>` inserted at the
/// start of the enclosing statement, windowed to `max_len` around the
/// annotation. `unit` is the abstraction of the unmutated source.
std::vector<std::string> annotate(const Mutant &m, const AbstractedUnit &unit, std::size_t max_len = 150);

struct SkippedSite {
  std::size_t token_index = 0;
  std::string reason;
};

struct GenerationReport {
  std::vector<Mutant> mutants;
  std::vector<SkippedSite> skipped;
};

/// All sites of one file. Predictor failures skip the site and are logged.
GenerationReport generate_all(const TokenStream &ts, Predictor &predictor, const GenerateOptions &opts,
                              const Validator &validator);

/// Manifest line: {id, file, token_index, site_kind, original, replacement, operator_tag, valid}.
nlohmann::json manifest_entry(const Mutant &m);

} // namespace mimicry
