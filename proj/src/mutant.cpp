#include "mimicry/mutant.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "mimicry/error.hpp"
#include "mimicry/process.hpp"

namespace mimicry {
namespace {

constexpr std::array<std::string_view, 18> kBinaryOperators = {
    "+", "-", "*", "/", "%", "<", "<=", ">", ">=", "==", "!=", "&&", "||", "&", "|", "^", "<<", ">>"};

constexpr std::array<std::string_view, 9> kDeclTypeKeywords = {
    "void", "int", "long", "short", "byte", "char", "boolean", "float", "double"};

bool ends_operand(const Token &t) {
  if (t.is_literal() || t.kind == TokenKind::Identifier) return true;
  if (t.kind == TokenKind::Keyword) return t.is("this") || t.is("super") || t.is("true") || t.is("false") || t.is("null");
  return t.is(")") || t.is("]") || t.is("++") || t.is("--");
}

bool starts_operand(const Token &t) {
  if (t.is_literal() || t.kind == TokenKind::Identifier || t.kind == TokenKind::Keyword) return true;
  return t.is("(") || t.is("!") || t.is("~") || t.is("-") || t.is("+") || t.is("++") || t.is("--");
}

bool is_decl_type_keyword(const Token &t) {
  return t.kind == TokenKind::Keyword && std::ranges::find(kDeclTypeKeywords, t.lexeme) != kDeclTypeKeywords.end();
}

struct StatementBounds {
  std::vector<std::size_t> begin;
  std::vector<std::size_t> end;
};

// `;`, `{` and `}` outside parentheses close a statement; the closing token
// belongs to the statement it ends.
StatementBounds statement_bounds(const std::vector<Token> &tokens) {
  StatementBounds b;
  b.begin.resize(tokens.size());
  b.end.resize(tokens.size());
  std::size_t start = 0;
  int parens = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token &t = tokens[i];
    b.begin[i] = start;
    if (t.is("(")) ++parens;
    if (t.is(")") && parens > 0) --parens;
    const bool closes = parens == 0 && (t.is(";") || t.is("{") || t.is("}"));
    if (closes || i + 1 == tokens.size()) {
      for (std::size_t j = start; j <= i; ++j) b.end[j] = i + 1;
      start = i + 1;
    }
  }
  return b;
}

// Marks tokens inside `package ...;` / `import ...;` and annotation names.
std::vector<bool> excluded_identifiers(const std::vector<Token> &tokens) {
  std::vector<bool> out(tokens.size(), false);
  bool in_header = false;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token &t = tokens[i];
    if (t.kind == TokenKind::Keyword && (t.is("package") || t.is("import"))) in_header = true;
    if (in_header) out[i] = true;
    if (t.is(";")) in_header = false;
    if (t.is("@") && i + 1 < tokens.size()) out[i + 1] = true;
  }
  return out;
}

std::string percent_encode(std::string_view text) {
  static constexpr char hex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    const bool plain = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                       c == '.' || c == '_' || c == '-';
    if (plain) {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 0xF];
    }
  }
  return out;
}

std::vector<std::string> scope_for(const TokenStream &ts, const MaskSite &site) {
  std::vector<std::string> scope;
  const Category want = classify_identifier(ts.tokens, site.token_index);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (ts[i].kind != TokenKind::Identifier) continue;
    if (classify_identifier(ts.tokens, i) == want) scope.push_back(ts[i].lexeme);
  }
  return scope;
}

std::string splice(const std::string &source, Span span, std::string_view replacement) {
  std::string out;
  out.reserve(source.size() + replacement.size());
  out.append(source, 0, span.begin);
  out.append(replacement);
  out.append(source, span.end, std::string::npos);
  return out;
}

// The patch is usable only if the mutated text lexes to the same token count
// and differs from the original at exactly `index`, holding `replacement`.
bool single_token_patch(const TokenStream &ts, std::size_t index, const std::string &patched,
                        const std::string &replacement) {
  TokenStream after;
  try {
    after = tokenize(patched);
  } catch (const Error &) {
    return false;
  }
  if (after.size() != ts.size()) return false;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (i == index) {
      if (after[i].lexeme != replacement) return false;
    } else if (after[i].lexeme != ts[i].lexeme) {
      return false;
    }
  }
  return true;
}

} // namespace

std::string_view to_string(OperatorTag tag) noexcept {
  switch (tag) {
  case OperatorTag::BinaryOperatorMutator: return "BinaryOperatorMutator";
  case OperatorTag::IdentifierMutator: return "IdentifierMutator";
  case OperatorTag::FieldAccessMutator: return "FieldAccessMutator";
  case OperatorTag::LiteralMutator: return "LiteralMutator";
  }
  return "?";
}

OperatorTag operator_tag_for(SiteKind kind) noexcept {
  switch (kind) {
  case SiteKind::BinaryOperator: return OperatorTag::BinaryOperatorMutator;
  case SiteKind::Identifier: return OperatorTag::IdentifierMutator;
  case SiteKind::FieldAccessName: return OperatorTag::FieldAccessMutator;
  case SiteKind::Literal: return OperatorTag::LiteralMutator;
  }
  return OperatorTag::IdentifierMutator;
}

OperatorTag operator_tag_from_string(std::string_view name) {
  for (auto t : {OperatorTag::BinaryOperatorMutator, OperatorTag::IdentifierMutator, OperatorTag::FieldAccessMutator,
                 OperatorTag::LiteralMutator})
    if (to_string(t) == name) return t;
  throw Error(ErrorKind::ConfigInvalid, "unknown operator tag " + std::string(name));
}

bool is_mutable_binary_operator(std::string_view op) noexcept {
  return std::ranges::find(kBinaryOperators, op) != kBinaryOperators.end();
}

std::vector<MaskSite> enumerate_sites(const TokenStream &ts) {
  std::vector<MaskSite> sites;
  const auto &tokens = ts.tokens;
  if (tokens.empty()) return sites;
  const auto bounds = statement_bounds(tokens);
  const auto excluded = excluded_identifiers(tokens);

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token &t = tokens[i];
    const Token *prev = i > 0 ? &tokens[i - 1] : nullptr;
    const Token *next = i + 1 < tokens.size() ? &tokens[i + 1] : nullptr;
    std::optional<SiteKind> kind;

    if (t.kind == TokenKind::Identifier && !excluded[i]) {
      const Category cat = classify_identifier(tokens, i);
      const bool type_position = next && next->kind == TokenKind::Identifier;
      const bool method_decl = cat == Category::Method && prev &&
                               (is_decl_type_keyword(*prev) || prev->kind == TokenKind::Identifier || prev->is(">"));
      if (prev && prev->is(".") && cat != Category::Type)
        kind = SiteKind::FieldAccessName;
      else if (cat != Category::Type && !type_position && !method_decl)
        kind = SiteKind::Identifier;
    } else if (t.kind == TokenKind::Operator && is_mutable_binary_operator(t.lexeme)) {
      if (prev && next && ends_operand(*prev) && starts_operand(*next)) kind = SiteKind::BinaryOperator;
    } else if (t.is_literal()) {
      kind = SiteKind::Literal;
    }

    if (kind) sites.push_back(MaskSite{i, *kind, t.lexeme, bounds.begin[i], bounds.end[i]});
  }
  return sites;
}

std::string mutant_id(std::string_view file, std::size_t token_index, std::string_view replacement) {
  return percent_encode(file) + "@" + std::to_string(token_index) + "@" + percent_encode(replacement);
}

Validator lexical_validator() {
  return [](const Mutant &m) {
    try {
      tokenize(m.patched_source);
      return true;
    } catch (const Error &) {
      return false;
    }
  };
}

Validator command_validator(std::string command, double timeout_s) {
  return [command = std::move(command), timeout_s](const Mutant &m) {
    TempDir dir("mimicry-validate");
    const auto name = std::filesystem::path(m.file).filename();
    const auto target = dir.path() / (name.empty() ? std::filesystem::path("mutant") : name);
    {
      std::ofstream out(target, std::ios::binary);
      out << m.patched_source;
    }
    std::string cmd = command;
    const std::string quoted = shell_quote(target.string());
    for (auto pos = cmd.find("{file}"); pos != std::string::npos; pos = cmd.find("{file}", pos + quoted.size()))
      cmd.replace(pos, 6, quoted);
    const auto result = run_shell(cmd, dir.path(), timeout_s);
    return !result.timed_out && result.exit_code == 0;
  };
}

std::vector<std::string> annotate(const Mutant &m, const AbstractedUnit &unit, std::size_t max_len) {
  const TokenStream mutated = tokenize(m.patched_source);
  auto abstracted = abstract(mutated, unit.idioms);
  auto &seq = abstracted.abstract_tokens;
  if (seq.size() != unit.abstract_tokens.size() || m.site.token_index >= seq.size() ||
      m.site.statement_begin > m.site.token_index || mutated[m.site.token_index].lexeme != m.replacement)
    throw Error(ErrorKind::SpanMismatch, "mutant " + m.id + " does not line up with its unit");
  const std::size_t at = m.site.statement_begin;
  seq.insert(seq.begin() + static_cast<std::ptrdiff_t>(at), "@" + std::string(to_string(m.operator_tag)));
  return window(seq, at, max_len);
}

std::vector<Mutant> generate(const TokenStream &ts, const MaskSite &site, Predictor &predictor,
                             const GenerateOptions &opts, const Validator &validator) {
  if (site.token_index >= ts.size() || ts[site.token_index].lexeme != site.original)
    throw Error(ErrorKind::SpanMismatch, "site does not match token stream");

  const AbstractedUnit unit = abstract(ts, opts.idioms);
  std::vector<std::string> base = opts.mask_on_abstracted ? unit.abstract_tokens : ts.lexemes();
  base[site.token_index] = std::string(kMaskToken);

  MaskQuery query;
  const auto range = window_range(base.size(), site.token_index, opts.max_len);
  query.masked_seq.assign(base.begin() + static_cast<std::ptrdiff_t>(range.begin),
                          base.begin() + static_cast<std::ptrdiff_t>(range.end));
  query.site_kind = site.site_kind;
  query.original = site.original;
  query.original_kind = ts[site.token_index].kind;
  query.k = opts.k;
  if (site.site_kind == SiteKind::Identifier || site.site_kind == SiteKind::FieldAccessName)
    query.scope_tokens = scope_for(ts, site);

  const auto predictions = predictor.predict(query);

  std::vector<Mutant> out;
  std::set<std::string> seen;
  const Span span = ts[site.token_index].span;
  for (const auto &p : predictions) {
    std::string candidate = p.token;
    if (opts.mask_on_abstracted)
      if (auto lexeme = unit.lookup(candidate)) candidate = *lexeme;
    if (candidate == site.original || !seen.insert(candidate).second) continue;

    Mutant m;
    m.file = opts.file;
    m.site = site;
    m.replacement = candidate;
    m.operator_tag = operator_tag_for(site.site_kind);
    m.id = mutant_id(opts.file, site.token_index, candidate);
    m.patched_source = splice(ts.source, span, candidate);
    if (!single_token_patch(ts, site.token_index, m.patched_source, candidate)) {
      spdlog::debug("dropping candidate '{}' at token {}: not a single-token patch", candidate, site.token_index);
      continue;
    }
    m.annotated_sequence = annotate(m, unit, opts.max_len);
    m.valid = validator(m);
    out.push_back(std::move(m));
    if (out.size() >= opts.k) break;
  }
  return out;
}

GenerationReport generate_all(const TokenStream &ts, Predictor &predictor, const GenerateOptions &opts,
                              const Validator &validator) {
  GenerationReport report;
  for (const auto &site : enumerate_sites(ts)) {
    try {
      auto mutants = generate(ts, site, predictor, opts, validator);
      std::ranges::move(mutants, std::back_inserter(report.mutants));
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::PredictorUnavailable && e.kind() != ErrorKind::MalformedResponse) throw;
      spdlog::warn("{}: skipping site at token {}: {}", opts.file, site.token_index, e.what());
      report.skipped.push_back({site.token_index, e.what()});
    }
  }
  return report;
}

nlohmann::json manifest_entry(const Mutant &m) {
  return {{"id", m.id},
          {"file", m.file},
          {"token_index", m.site.token_index},
          {"site_kind", to_string(m.site.site_kind)},
          {"original", m.site.original},
          {"replacement", m.replacement},
          {"operator_tag", to_string(m.operator_tag)},
          {"valid", m.valid}};
}

} // namespace mimicry
