#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mimicry {

enum class TokenKind {
  Keyword,
  Identifier,
  Operator,
  Punctuation,
  StringLit,
  CharLit,
  IntLit,
  FloatLit,
};

std::string_view to_string(TokenKind kind) noexcept;

/// Half-open byte range into the source text.
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Span &, const Span &) = default;
};

struct Token {
  std::string lexeme;
  TokenKind kind = TokenKind::Identifier;
  Span span;

  bool is_literal() const noexcept {
    return kind == TokenKind::StringLit || kind == TokenKind::CharLit ||
           kind == TokenKind::IntLit || kind == TokenKind::FloatLit;
  }
  bool is(std::string_view text) const noexcept { return lexeme == text; }
};

/// Lexed source. Keeps the original text so spans can be resolved and
/// patched without re-reading the file.
struct TokenStream {
  std::string source;
  std::vector<Token> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  const Token &operator[](std::size_t i) const { return tokens[i]; }

  std::vector<std::string> lexemes() const;
  /// Tokens joined by the original inter-token text with comments removed.
  std::string stripped_source() const;
};

/// Java-like lexer. Comments are dropped; whitespace is not tokenized.
/// A `-` directly followed by a digit lexes as part of a numeric literal
/// unless the previous token ends an operand (`a-1` is three tokens, `x = -1`
/// is three tokens with `-1` a single literal).
///
/// Throws Error{UnterminatedLiteral | UnterminatedComment | InvalidCharacter}.
TokenStream tokenize(std::string source);

/// Removes `//` and `/* */` comments, leaving everything else untouched
/// (string and char literals are respected).
std::string strip_comments(std::string_view source);

bool is_java_keyword(std::string_view word) noexcept;

} // namespace mimicry
