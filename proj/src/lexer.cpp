#include "mimicry/lexer.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <unordered_set>

#include "mimicry/error.hpp"

namespace mimicry {
namespace {

// Longest first so maximal munch is a linear scan.
constexpr std::array<std::string_view, 40> kOperators = {
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "&&", "||",
    "==",   "!=",  "<=",  ">=",  "+=",  "-=", "*=", "/=", "%=", "&=", "|=",
    "^=",   "<<",  ">>",  "+",   "-",   "*",  "/",  "%",  "<",  ">",  "=",
    "!",    "~",   "?",   ":",   "&",   "|",  "^"};

bool is_punctuation(char c) {
  switch (c) {
  case '(': case ')': case '{': case '}': case '[': case ']':
  case ';': case ',': case '.': case '@':
    return true;
  default:
    return false;
  }
}

bool is_ident_start(unsigned char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_' || c == '$' || c >= 0x80;
}

bool is_ident_part(unsigned char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

bool is_digit(char c) { return c >= '0' && c <= '9'; }

bool is_hex_digit(char c) {
  return is_digit(c) || (c >= 'a' && c <= 'f') || (c >= 'A' && c <= 'F');
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

// True when the previous token ends an operand, so a following `-` is binary.
bool ends_operand(const std::vector<Token> &tokens) {
  if (tokens.empty()) return false;
  const Token &t = tokens.back();
  if (t.is_literal() || t.kind == TokenKind::Identifier) return true;
  if (t.kind == TokenKind::Keyword)
    return t.is("this") || t.is("super") || t.is("true") || t.is("false") || t.is("null");
  return t.is(")") || t.is("]") || t.is("++") || t.is("--");
}

class Lexer {
public:
  explicit Lexer(const std::string &src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (is_space(c)) {
        ++pos_;
        continue;
      }
      if (c == '/' && peek(1) == '/') {
        skip_line_comment();
        continue;
      }
      if (c == '/' && peek(1) == '*') {
        skip_block_comment();
        continue;
      }
      const std::size_t start = pos_;
      TokenKind kind;
      if (is_ident_start(static_cast<unsigned char>(c))) {
        while (pos_ < src_.size() && is_ident_part(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view word(src_.data() + start, pos_ - start);
        kind = is_java_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier;
      } else if (is_digit(c) || (c == '.' && is_digit(peek(1))) ||
                 (c == '-' && (is_digit(peek(1)) || (peek(1) == '.' && is_digit(peek(2)))) &&
                  !ends_operand(out))) {
        kind = lex_number();
      } else if (c == '"') {
        lex_string();
        kind = TokenKind::StringLit;
      } else if (c == '\'') {
        lex_quoted('\'');
        kind = TokenKind::CharLit;
      } else if (is_punctuation(c) && !(c == '.' && peek(1) == '.' && peek(2) == '.')) {
        ++pos_;
        kind = TokenKind::Punctuation;
      } else if (auto len = match_operator(); len > 0) {
        pos_ += len;
        kind = TokenKind::Operator;
      } else {
        throw Error(ErrorKind::InvalidCharacter,
                    "unexpected character '" + std::string(1, c) + "' at byte " + std::to_string(pos_));
      }
      out.push_back(Token{src_.substr(start, pos_ - start), kind, Span{start, pos_}});
    }
    return out;
  }

private:
  char peek(std::size_t ahead) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }

  void skip_line_comment() {
    while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
  }

  void skip_block_comment() {
    const std::size_t start = pos_;
    const auto close = src_.find("*/", pos_ + 2);
    if (close == std::string::npos)
      throw Error(ErrorKind::UnterminatedComment, "block comment opened at byte " + std::to_string(start));
    pos_ = close + 2;
  }

  std::size_t match_operator() const {
    const std::string_view rest(src_.data() + pos_, src_.size() - pos_);
    for (auto op : kOperators)
      if (rest.starts_with(op)) return op.size();
    return 0;
  }

  void digits(bool (*accept)(char)) {
    while (pos_ < src_.size() && (accept(src_[pos_]) || src_[pos_] == '_')) ++pos_;
  }

  TokenKind lex_number() {
    if (src_[pos_] == '-') ++pos_;
    bool is_float = false;
    if (src_[pos_] == '0' && (peek(1) == 'x' || peek(1) == 'X')) {
      pos_ += 2;
      digits(is_hex_digit);
    } else if (src_[pos_] == '0' && (peek(1) == 'b' || peek(1) == 'B')) {
      pos_ += 2;
      digits([](char ch) { return ch == '0' || ch == '1'; });
    } else {
      digits(is_digit);
      if (pos_ < src_.size() && src_[pos_] == '.' && is_digit(peek(1))) {
        is_float = true;
        ++pos_;
        digits(is_digit);
      }
      if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
        const std::size_t sign = (peek(1) == '+' || peek(1) == '-') ? 1 : 0;
        if (is_digit(peek(1 + sign))) {
          is_float = true;
          pos_ += 1 + sign;
          digits(is_digit);
        }
      }
    }
    if (pos_ < src_.size()) {
      const char s = src_[pos_];
      if (s == 'l' || s == 'L') {
        ++pos_;
      } else if (s == 'f' || s == 'F' || s == 'd' || s == 'D') {
        ++pos_;
        is_float = true;
      }
    }
    return is_float ? TokenKind::FloatLit : TokenKind::IntLit;
  }

  void lex_string() {
    if (peek(1) == '"' && peek(2) == '"') {
      const std::size_t start = pos_;
      const auto close = src_.find("\"\"\"", pos_ + 3);
      if (close == std::string::npos)
        throw Error(ErrorKind::UnterminatedLiteral, "text block opened at byte " + std::to_string(start));
      pos_ = close + 3;
      return;
    }
    lex_quoted('"');
  }

  void lex_quoted(char quote) {
    const std::size_t start = pos_++;
    while (pos_ < src_.size()) {
      const char ch = src_[pos_];
      if (ch == '\\') {
        pos_ += 2;
        continue;
      }
      if (ch == '\n') break;
      ++pos_;
      if (ch == quote) return;
    }
    throw Error(ErrorKind::UnterminatedLiteral, "literal opened at byte " + std::to_string(start));
  }

  const std::string &src_;
  std::size_t pos_ = 0;
};

} // namespace

std::string_view to_string(TokenKind kind) noexcept {
  switch (kind) {
  case TokenKind::Keyword: return "keyword";
  case TokenKind::Identifier: return "identifier";
  case TokenKind::Operator: return "operator";
  case TokenKind::Punctuation: return "punctuation";
  case TokenKind::StringLit: return "string-lit";
  case TokenKind::CharLit: return "char-lit";
  case TokenKind::IntLit: return "int-lit";
  case TokenKind::FloatLit: return "float-lit";
  }
  return "unknown";
}

bool is_java_keyword(std::string_view word) noexcept {
  static const std::unordered_set<std::string_view> keywords = {
      "abstract", "assert",     "boolean",   "break",     "byte",     "case",       "catch",
      "char",     "class",      "const",     "continue",  "default",  "do",         "double",
      "else",     "enum",       "extends",   "final",     "finally",  "float",      "for",
      "goto",     "if",         "implements", "import",   "instanceof", "int",      "interface",
      "long",     "native",     "new",       "package",   "private",  "protected",  "public",
      "return",   "short",      "static",    "strictfp",  "super",    "switch",     "synchronized",
      "this",     "throw",      "throws",    "transient", "try",      "void",       "volatile",
      "while",    "var",        "true",      "false",     "null"};
  return keywords.contains(word);
}

TokenStream tokenize(std::string source) {
  TokenStream ts;
  ts.source = std::move(source);
  ts.tokens = Lexer(ts.source).run();
  return ts;
}

std::vector<std::string> TokenStream::lexemes() const {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto &t : tokens) out.push_back(t.lexeme);
  return out;
}

std::string TokenStream::stripped_source() const {
  std::string out;
  out.reserve(source.size());
  std::size_t cursor = 0;
  for (const auto &t : tokens) {
    out += strip_comments(std::string_view(source).substr(cursor, t.span.begin - cursor));
    out += t.lexeme;
    cursor = t.span.end;
  }
  out += strip_comments(std::string_view(source).substr(cursor));
  return out;
}

std::string strip_comments(std::string_view source) {
  enum class State { Code, Line, Block, Str, Chr };
  std::string out;
  out.reserve(source.size());
  State state = State::Code;
  for (std::size_t i = 0; i < source.size(); ++i) {
    const char c = source[i];
    const char next = i + 1 < source.size() ? source[i + 1] : '\0';
    switch (state) {
    case State::Code:
      if (c == '/' && next == '/') {
        state = State::Line;
        ++i;
      } else if (c == '/' && next == '*') {
        state = State::Block;
        ++i;
      } else {
        if (c == '"') state = State::Str;
        if (c == '\'') state = State::Chr;
        out += c;
      }
      break;
    case State::Line:
      if (c == '\n') {
        out += c;
        state = State::Code;
      }
      break;
    case State::Block:
      if (c == '*' && next == '/') {
        state = State::Code;
        ++i;
      }
      break;
    case State::Str:
    case State::Chr:
      out += c;
      if (c == '\\' && i + 1 < source.size()) {
        out += source[++i];
      } else if ((state == State::Str && c == '"') || (state == State::Chr && c == '\'') || c == '\n') {
        state = State::Code;
      }
      break;
    }
  }
  return out;
}

} // namespace mimicry
