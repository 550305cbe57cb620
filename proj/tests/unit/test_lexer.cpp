#include <doctest.h>

#include "mimicry/error.hpp"
#include "mimicry/lexer.hpp"

using namespace mimicry;

namespace {
std::vector<std::string> lex(const std::string &s) { return tokenize(s).lexemes(); }
} // namespace

TEST_CASE("line comments are dropped") {
  CHECK(lex("int position = 0; // init") == std::vector<std::string>{"int", "position", "=", "0", ";"});
}

TEST_CASE("empty source") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \n\t /* only a comment */ ").empty());
}

TEST_CASE("method call kinds") {
  const auto ts = tokenize("in.read()");
  REQUIRE(ts.size() == 5);
  CHECK(ts.lexemes() == std::vector<std::string>{"in", ".", "read", "(", ")"});
  CHECK(ts[0].kind == TokenKind::Identifier);
  CHECK(ts[1].kind == TokenKind::Punctuation);
  CHECK(ts[2].kind == TokenKind::Identifier);
  CHECK(ts[3].kind == TokenKind::Punctuation);
  CHECK(ts[4].kind == TokenKind::Punctuation);
}

TEST_CASE("spans index the source") {
  const auto ts = tokenize("a  +=\tb2");
  for (const auto &t : ts.tokens) CHECK(ts.source.substr(t.span.begin, t.span.size()) == t.lexeme);
  CHECK(ts[1].kind == TokenKind::Operator);
}

TEST_CASE("maximal munch on operators") {
  CHECK(lex("a>>>=b") == std::vector<std::string>{"a", ">>>=", "b"});
  CHECK(lex("x->y") == std::vector<std::string>{"x", "->", "y"});
  CHECK(lex("i++<n") == std::vector<std::string>{"i", "++", "<", "n"});
}

TEST_CASE("unary minus joins a literal only outside operand context") {
  CHECK(lex("return -1;") == std::vector<std::string>{"return", "-1", ";"});
  CHECK(lex("a-1") == std::vector<std::string>{"a", "-", "1"});
  CHECK(lex("f(x)-2") == std::vector<std::string>{"f", "(", "x", ")", "-", "2"});
  CHECK(lex("x = - 1") == std::vector<std::string>{"x", "=", "-", "1"});
}

TEST_CASE("literal kinds") {
  const auto ts = tokenize(R"("s\"q" 'c' 12 0x1F 3.5 1e3 2f 7L)");
  REQUIRE(ts.size() == 8);
  CHECK(ts[0].kind == TokenKind::StringLit);
  CHECK(ts[0].lexeme == R"("s\"q")");
  CHECK(ts[1].kind == TokenKind::CharLit);
  CHECK(ts[2].kind == TokenKind::IntLit);
  CHECK(ts[3].kind == TokenKind::IntLit);
  CHECK(ts[4].kind == TokenKind::FloatLit);
  CHECK(ts[5].kind == TokenKind::FloatLit);
  CHECK(ts[6].kind == TokenKind::FloatLit);
  CHECK(ts[7].kind == TokenKind::IntLit);
}

TEST_CASE("comment markers inside strings are kept") {
  CHECK(lex(R"(s = "// no" + "/* no */";)") ==
        std::vector<std::string>{"s", "=", R"("// no")", "+", R"("/* no */")", ";"});
}

TEST_CASE("annotations split into @ and name") {
  CHECK(lex("@Override void f()") == std::vector<std::string>{"@", "Override", "void", "f", "(", ")"});
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(tokenize("\"open"), Error);
  try {
    tokenize("x = \"open\n\";");
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::UnterminatedLiteral);
  }
  try {
    tokenize("/* never closed");
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::UnterminatedComment);
  }
  try {
    tokenize("a # b");
    FAIL("expected throw");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::InvalidCharacter);
  }
}

TEST_CASE("strip_comments and stripped_source agree") {
  const std::string src = "int a; // x\n/* y */ int b = \"/*s*/\"; char c = '/';";
  const auto ts = tokenize(src);
  CHECK(ts.stripped_source() == strip_comments(src));
  CHECK(strip_comments(src).find("x\n") == std::string::npos);
  CHECK(strip_comments(src).find("\"/*s*/\"") != std::string::npos);
}
