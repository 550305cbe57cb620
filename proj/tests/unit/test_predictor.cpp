#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mimicry/error.hpp"
#include "mimicry/predictor.hpp"

using namespace mimicry;

namespace {

MaskQuery query(SiteKind kind, std::string original, TokenKind okind, std::size_t k = 5) {
  MaskQuery q;
  q.masked_seq = {"if", "(", "VAR_1", std::string(kMaskToken), "INT_1", ")"};
  q.site_kind = kind;
  q.original = std::move(original);
  q.original_kind = okind;
  q.k = k;
  return q;
}

std::vector<std::string> tokens(const std::vector<Prediction> &ps) {
  std::vector<std::string> out;
  for (const auto &p : ps) out.push_back(p.token);
  return out;
}

ErrorKind kind_of(auto &&fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::Io;
}

// In-process stand-in for the prediction service.
class StubService {
public:
  explicit StubService(std::function<void(const httplib::Request &, httplib::Response &)> predict) {
    server_.Post("/v1/predict", [this, predict](const httplib::Request &req, httplib::Response &res) {
      ++calls;
      predict(req, res);
    });
    server_.Get("/v1/health", [](const httplib::Request &, httplib::Response &res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubService() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<int> calls{0};

private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

void reply(httplib::Response &res, const nlohmann::json &body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

} // namespace

TEST_CASE("relational complement") {
  const auto ps = predict_builtin(query(SiteKind::BinaryOperator, "<", TokenKind::Operator));
  CHECK(tokens(ps) == std::vector<std::string>{"<=", ">", ">=", "==", "!="});
  CHECK(tokens(predict_builtin(query(SiteKind::BinaryOperator, "<", TokenKind::Operator, 2))) ==
        std::vector<std::string>{"<=", ">"});
}

TEST_CASE("other operator families") {
  CHECK(tokens(predict_builtin(query(SiteKind::BinaryOperator, "+", TokenKind::Operator))) ==
        std::vector<std::string>{"-", "*", "/", "%"});
  CHECK(tokens(predict_builtin(query(SiteKind::BinaryOperator, "&&", TokenKind::Operator))) ==
        std::vector<std::string>{"||"});
  CHECK(predict_builtin(query(SiteKind::BinaryOperator, "instanceof", TokenKind::Keyword)).empty());
}

TEST_CASE("identifier frequency") {
  auto q = query(SiteKind::Identifier, "n", TokenKind::Identifier, 2);
  q.scope_tokens = {"n", "total", "position", "total", "position", "position"};
  CHECK(tokens(predict_builtin(q)) == std::vector<std::string>{"position", "total"});
  q.k = 5;
  CHECK(tokens(predict_builtin(q)) == std::vector<std::string>{"position", "total", "n"});
}

TEST_CASE("ties keep first occurrence") {
  auto q = query(SiteKind::Identifier, "z", TokenKind::Identifier, 3);
  q.scope_tokens = {"b", "a", "c", "a", "b", "c"};
  CHECK(tokens(predict_builtin(q)) == std::vector<std::string>{"b", "a", "c"});
}

TEST_CASE("integer neighbours") {
  CHECK(tokens(predict_builtin(query(SiteKind::Literal, "128", TokenKind::IntLit, 3))) ==
        std::vector<std::string>{"129", "127", "0"});
  CHECK(tokens(predict_builtin(query(SiteKind::Literal, "0", TokenKind::IntLit))) ==
        std::vector<std::string>{"1", "-1", "0"});
  CHECK(tokens(predict_builtin(query(SiteKind::Literal, "-1", TokenKind::IntLit))) ==
        std::vector<std::string>{"0", "-2", "1"});
  CHECK(tokens(predict_builtin(query(SiteKind::Literal, "0x10", TokenKind::IntLit, 1))) ==
        std::vector<std::string>{"17"});
  CHECK(tokens(predict_builtin(query(SiteKind::Literal, "5L", TokenKind::IntLit, 2))) ==
        std::vector<std::string>{"6L", "4L"});
}

TEST_CASE("float, string and char neighbours") {
  CHECK(tokens(predict_builtin(query(SiteKind::Literal, "2.5", TokenKind::FloatLit))) ==
        std::vector<std::string>{"3.5", "1.5", "0.0", "1.0", "-2.5"});
  CHECK(tokens(predict_builtin(query(SiteKind::Literal, "\"x\"", TokenKind::StringLit))) ==
        std::vector<std::string>{"\"\"", "null"});
  CHECK(tokens(predict_builtin(query(SiteKind::Literal, "'x'", TokenKind::CharLit))) ==
        std::vector<std::string>{"'\\0'", "'a'"});
}

TEST_CASE("builtin scores are 1/rank and the function is pure") {
  const auto q = query(SiteKind::BinaryOperator, ">=", TokenKind::Operator);
  const auto a = predict_builtin(q);
  CHECK(a == predict_builtin(q));
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].score == doctest::Approx(1.0 / static_cast<double>(i + 1)));
    CHECK(a[i].score > 0.0);
    CHECK(a[i].score <= 1.0);
    if (i > 0) CHECK(a[i].score <= a[i - 1].score);
  }
}

TEST_CASE("mask count") {
  auto q = query(SiteKind::Identifier, "x", TokenKind::Identifier);
  q.masked_seq = {"a", "b"};
  CHECK(kind_of([&] { predict_builtin(q); }) == ErrorKind::NoMaskToken);
  q.masked_seq = {"<mask>", "b", "<mask>"};
  CHECK(kind_of([&] { predict_builtin(q); }) == ErrorKind::MultipleMaskTokens);
  CHECK(find_mask(std::vector<std::string>{"a", "<mask>"}) == 1);
}

TEST_CASE("remote predictor round trip") {
  nlohmann::json seen;
  StubService svc([&](const httplib::Request &req, httplib::Response &res) {
    seen = nlohmann::json::parse(req.body);
    reply(res, {{"candidates",
                 {{{"token", "total"}, {"score", 0.9}},
                  {{"token", "length"}, {"score", 0.5}},
                  {{"token", "size"}, {"score", 0.5}},
                  {{"token", "count"}, {"score", 0.2}},
                  {{"token", "value"}, {"score", 0.1}},
                  {{"token", "extra"}, {"score", 0.05}}}}});
  });
  const std::vector<std::string> seq = {"int", "total", "=", "out", ".", "<mask>", ";"};
  const auto ps = predict_remote(svc.url(), seq, 5, 2000);
  CHECK(seen["sequence"] == "int total = out . <mask> ;");
  CHECK(seen["k"] == 5);
  CHECK(tokens(ps) == std::vector<std::string>{"total", "length", "size", "count", "value"});
  CHECK(predict_remote(svc.url(), seq, 1, 2000).size() == 1);
  CHECK(RemotePredictor(svc.url()).healthy());
}

TEST_CASE("remote predictor endpoint prefix") {
  httplib::Server server;
  server.Post("/api/v1/predict", [](const httplib::Request &, httplib::Response &res) {
    reply(res, {{"candidates", {{{"token", "x"}, {"score", 1.0}}}}});
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const auto ps = predict_remote("http://127.0.0.1:" + std::to_string(port) + "/api/", std::vector<std::string>{"<mask>"},
                                 3, 2000);
  server.stop();
  t.join();
  CHECK(tokens(ps) == std::vector<std::string>{"x"});
}

TEST_CASE("remote predictor retries once on 5xx") {
  StubService flaky([&](const httplib::Request &, httplib::Response &res) {
    static int n = 0;
    if (n++ == 0)
      reply(res, {{"error", "loading"}}, 503);
    else
      reply(res, {{"candidates", {{{"token", "a"}, {"score", 1.0}}}}});
  });
  CHECK(predict_remote(flaky.url(), std::vector<std::string>{"<mask>"}, 5, 2000).size() == 1);
  CHECK(flaky.calls == 2);

  StubService down([](const httplib::Request &, httplib::Response &res) { reply(res, {}, 503); });
  CHECK(kind_of([&] { predict_remote(down.url(), std::vector<std::string>{"<mask>"}, 5, 2000); }) ==
        ErrorKind::PredictorUnavailable);
  CHECK(down.calls == 2);
}

TEST_CASE("remote predictor unreachable") {
  int port;
  {
    httplib::Server s;
    port = s.bind_to_any_port("127.0.0.1");
  }
  const auto url = "http://127.0.0.1:" + std::to_string(port);
  CHECK(kind_of([&] { predict_remote(url, std::vector<std::string>{"<mask>"}, 5, 300); }) ==
        ErrorKind::PredictorUnavailable);
  CHECK_FALSE(RemotePredictor(url, 300).healthy());
}

TEST_CASE("remote predictor schema violations") {
  const std::vector<std::string> seq = {"<mask>"};
  const auto expect_malformed = [&](std::function<void(httplib::Response &)> respond) {
    StubService svc([&](const httplib::Request &, httplib::Response &res) { respond(res); });
    CHECK(kind_of([&] { predict_remote(svc.url(), seq, 5, 2000); }) == ErrorKind::MalformedResponse);
  };
  expect_malformed([](httplib::Response &res) { res.set_content("not json", "text/plain"); });
  expect_malformed([](httplib::Response &res) { reply(res, {{"tokens", nlohmann::json::array()}}); });
  expect_malformed([](httplib::Response &res) { reply(res, {{"candidates", {{{"token", "a"}}}}}); });
  expect_malformed([](httplib::Response &res) { reply(res, {{"candidates", {{{"token", "a"}, {"score", 1.5}}}}}); });
  expect_malformed([](httplib::Response &res) { reply(res, {{"candidates", {{{"token", "a"}, {"score", 0.0}}}}}); });
  expect_malformed([](httplib::Response &res) {
    reply(res, {{"candidates", {{{"token", "a"}, {"score", 0.2}}, {{"token", "b"}, {"score", 0.4}}}}});
  });
  expect_malformed([](httplib::Response &res) { reply(res, {{"error", "no mask"}}, 400); });
}

TEST_CASE("remote predictor rejects local mask errors before sending") {
  CHECK(kind_of([] { predict_remote("http://127.0.0.1:1", std::vector<std::string>{"a"}, 5, 100); }) ==
        ErrorKind::NoMaskToken);
}
