#include "mimicry/abstraction.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "mimicry/error.hpp"

namespace mimicry {
namespace {

bool is_type_context(const Token &prev) {
  static constexpr std::array<std::string_view, 7> ctx = {
      "new", "class", "interface", "enum", "extends", "implements", "throws"};
  return prev.kind == TokenKind::Keyword && std::ranges::find(ctx, prev.lexeme) != ctx.end();
}

std::optional<Category> literal_category(TokenKind kind) {
  switch (kind) {
  case TokenKind::StringLit: return Category::String;
  case TokenKind::CharLit: return Category::Char;
  case TokenKind::IntLit: return Category::Int;
  case TokenKind::FloatLit: return Category::Float;
  default: return std::nullopt;
  }
}

std::string make_id(Category c, std::size_t n) {
  return std::string(to_string(c)) + "_" + std::to_string(n);
}

} // namespace

std::string_view to_string(Category c) noexcept {
  switch (c) {
  case Category::Type: return "TYPE";
  case Category::Method: return "METHOD";
  case Category::Var: return "VAR";
  case Category::String: return "STRING";
  case Category::Char: return "CHAR";
  case Category::Int: return "INT";
  case Category::Float: return "FLOAT";
  }
  return "?";
}

std::optional<Category> category_from_string(std::string_view name) noexcept {
  for (auto c : kAllCategories)
    if (to_string(c) == name) return c;
  return std::nullopt;
}

std::set<std::string> default_idioms() { return {"0", "1", "-1", "\"\"", "null", "true", "false"}; }

std::optional<std::string> AbstractedUnit::lookup(std::string_view id) const {
  const auto sep = id.rfind('_');
  if (sep == std::string_view::npos || sep + 1 >= id.size()) return std::nullopt;
  const auto cat = category_from_string(id.substr(0, sep));
  if (!cat) return std::nullopt;
  std::size_t n = 0;
  const auto digits = id.substr(sep + 1);
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
  if (ec != std::errc{} || ptr != digits.data() + digits.size() || n == 0) return std::nullopt;
  const auto it = symbols.find(*cat);
  if (it == symbols.end() || n > it->second.size()) return std::nullopt;
  return it->second[n - 1];
}

std::vector<std::string> AbstractedUnit::deabstract() const {
  std::vector<std::string> out;
  out.reserve(abstract_tokens.size());
  for (const auto &t : abstract_tokens) out.push_back(lookup(t).value_or(t));
  return out;
}

Category classify_identifier(std::span<const Token> tokens, std::size_t index) {
  const Token &tok = tokens[index];
  if (index > 0 && is_type_context(tokens[index - 1])) return Category::Type;
  if (index + 1 < tokens.size() && tokens[index + 1].is("(")) return Category::Method;
  if (std::isupper(static_cast<unsigned char>(tok.lexeme.front()))) return Category::Type;
  return Category::Var;
}

AbstractedUnit abstract(const TokenStream &ts, const std::set<std::string> &idioms) {
  return abstract_tokens(ts.tokens, idioms);
}

AbstractedUnit abstract_tokens(std::span<const Token> tokens, const std::set<std::string> &idioms) {
  AbstractedUnit unit;
  unit.idioms = idioms;
  unit.abstract_tokens.reserve(tokens.size());
  std::map<Category, std::unordered_map<std::string, std::size_t>> ids;

  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const Token &tok = tokens[i];
    std::optional<Category> cat;
    if (tok.kind == TokenKind::Identifier)
      cat = classify_identifier(tokens, i);
    else
      cat = literal_category(tok.kind);

    if (!cat || idioms.contains(tok.lexeme)) {
      unit.abstract_tokens.push_back(tok.lexeme);
      continue;
    }
    auto &table = unit.symbols[*cat];
    auto [it, inserted] = ids[*cat].try_emplace(tok.lexeme, table.size() + 1);
    if (inserted) table.push_back(tok.lexeme);
    unit.abstract_tokens.push_back(make_id(*cat, it->second));
  }
  return unit;
}

std::string flatten(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string flatten_raw(std::span<const std::string> tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    for (char c : tokens[i]) {
      switch (c) {
      case '\\': out += "\\\\"; break;
      case ' ': out += "\\s"; break;
      case '\t': out += "\\t"; break;
      case '\n': out += "\\n"; break;
      default: out += c;
      }
    }
  }
  return out;
}

std::vector<std::string> unflatten_raw(std::string_view text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::string cur;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == ' ') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c == '\\' && i + 1 < text.size()) {
      const char e = text[++i];
      cur += e == 's' ? ' ' : e == 't' ? '\t' : e == 'n' ? '\n' : e;
    } else {
      cur += c;
    }
  }
  out.push_back(std::move(cur));
  return out;
}

WindowRange window_range(std::size_t len, std::size_t center, std::size_t max_len) {
  if (max_len < 1) throw Error(ErrorKind::IndexOutOfRange, "window length must be >= 1");
  if (center >= len)
    throw Error(ErrorKind::IndexOutOfRange,
                "center " + std::to_string(center) + " outside sequence of length " + std::to_string(len));
  const std::size_t width = std::min(len, max_len);
  const std::size_t half = max_len / 2;
  const std::size_t start = std::min(center > half ? center - half : 0, len - width);
  return {start, start + width};
}

std::vector<std::string> window(std::span<const std::string> seq, std::size_t center, std::size_t max_len) {
  const auto r = window_range(seq.size(), center, max_len);
  return {seq.begin() + static_cast<std::ptrdiff_t>(r.begin), seq.begin() + static_cast<std::ptrdiff_t>(r.end)};
}

void to_json(nlohmann::json &j, const AbstractedUnit &u) {
  nlohmann::json symbols = nlohmann::json::object();
  for (const auto &[cat, lexemes] : u.symbols) {
    nlohmann::json table = nlohmann::json::object();
    for (std::size_t i = 0; i < lexemes.size(); ++i) table[make_id(cat, i + 1)] = lexemes[i];
    symbols[std::string(to_string(cat))] = std::move(table);
  }
  j = nlohmann::json{{"tokens", u.abstract_tokens}, {"symbols", std::move(symbols)}, {"idioms", u.idioms}};
}

void from_json(const nlohmann::json &j, AbstractedUnit &u) {
  u = AbstractedUnit{};
  j.at("tokens").get_to(u.abstract_tokens);
  j.at("idioms").get_to(u.idioms);
  for (const auto &[name, table] : j.at("symbols").items()) {
    const auto cat = category_from_string(name);
    if (!cat) throw Error(ErrorKind::ConfigInvalid, "unknown symbol category " + name);
    auto &lexemes = u.symbols[*cat];
    lexemes.resize(table.size());
    for (const auto &[id, lexeme] : table.items()) {
      const auto n = std::stoul(id.substr(id.rfind('_') + 1));
      if (n == 0 || n > lexemes.size()) throw Error(ErrorKind::ConfigInvalid, "non-sequential symbol id " + id);
      lexemes[n - 1] = lexeme.get<std::string>();
    }
  }
}

} // namespace mimicry
