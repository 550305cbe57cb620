#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "mimicry/lexer.hpp"

namespace mimicry {

enum class Category { Type, Method, Var, String, Char, Int, Float };

inline constexpr std::array<Category, 7> kAllCategories = {
    Category::Type, Category::Method, Category::Var, Category::String,
    Category::Char, Category::Int,    Category::Float};

std::string_view to_string(Category c) noexcept;
std::optional<Category> category_from_string(std::string_view name) noexcept;

/// Lexemes that survive abstraction verbatim.
std::set<std::string> default_idioms();

/// Abstracted token sequence plus the table that maps IDs back to lexemes.
///
/// IDs look like `VAR_3`. Numbering is per category, starts at 1 and follows
/// first occurrence; a lexeme seen again in the same category reuses its ID.
struct AbstractedUnit {
  std::vector<std::string> abstract_tokens;
  /// symbols[c][n - 1] is the lexeme behind `<c>_n`.
  std::map<Category, std::vector<std::string>> symbols;
  std::set<std::string> idioms;

  /// Resolves an abstract ID (`TYPE_2`) to its lexeme, if it is one.
  std::optional<std::string> lookup(std::string_view id) const;
  /// Maps every token back through the symbol table.
  std::vector<std::string> deabstract() const;
};

/// Identifier classification used by abstraction:
///  - TYPE after `new`, `class`, `interface`, `enum`, `extends`, `implements`, `throws`
///  - METHOD when the next token is `(`
///  - TYPE when the first character is uppercase
///  - VAR otherwise
Category classify_identifier(std::span<const Token> tokens, std::size_t index);

AbstractedUnit abstract(const TokenStream &ts, const std::set<std::string> &idioms = default_idioms());

AbstractedUnit abstract_tokens(std::span<const Token> tokens, const std::set<std::string> &idioms);

/// Tokens joined by a single space.
std::string flatten(std::span<const std::string> tokens);

/// Raw-mode flatten for non-abstracted lexemes: `\` becomes `\\`, space
/// becomes `\s`, tab `\t`, newline `\n`, so the output splits back cleanly.
std::string flatten_raw(std::span<const std::string> tokens);
std::vector<std::string> unflatten_raw(std::string_view text);

/// Contiguous slice [begin, end) of at most `max_len` tokens centred on
/// `center`, clamped to the sequence bounds.
struct WindowRange {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const WindowRange &, const WindowRange &) = default;
};

WindowRange window_range(std::size_t len, std::size_t center, std::size_t max_len = 150);
std::vector<std::string> window(std::span<const std::string> seq, std::size_t center,
                                std::size_t max_len = 150);

void to_json(nlohmann::json &j, const AbstractedUnit &u);
void from_json(const nlohmann::json &j, AbstractedUnit &u);

} // namespace mimicry
