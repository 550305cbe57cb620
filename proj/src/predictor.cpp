#include "mimicry/predictor.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <optional>
#include <unordered_map>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "mimicry/abstraction.hpp"
#include "mimicry/error.hpp"

namespace mimicry {
namespace {

using Family = std::vector<std::string_view>;

const std::array<Family, 5> &operator_families() {
  static const std::array<Family, 5> families = {
      Family{"<", "<=", ">", ">=", "==", "!="},
      Family{"+", "-", "*", "/", "%"},
      Family{"&&", "||"},
      Family{"&", "|", "^"},
      Family{"<<", ">>"},
  };
  return families;
}

std::vector<std::string> complement(const std::string &op) {
  for (const auto &family : operator_families()) {
    if (std::ranges::find(family, op) == family.end()) continue;
    std::vector<std::string> out;
    for (auto other : family)
      if (other != op) out.emplace_back(other);
    return out;
  }
  return {};
}

std::vector<std::string> frequent_identifiers(std::span<const std::string> scope) {
  std::unordered_map<std::string, std::size_t> count;
  std::vector<std::string> order;
  for (const auto &t : scope)
    if (count[t]++ == 0) order.push_back(t);
  std::ranges::stable_sort(order, [&](const auto &a, const auto &b) { return count[a] > count[b]; });
  return order;
}

struct IntLiteral {
  long long value = 0;
  std::string suffix;
};

std::optional<IntLiteral> parse_int(std::string_view text) {
  IntLiteral lit;
  if (!text.empty() && (text.back() == 'l' || text.back() == 'L')) {
    lit.suffix = text.back();
    text.remove_suffix(1);
  }
  std::string digits;
  for (char c : text)
    if (c != '_') digits += c;
  bool negative = false;
  std::string_view body = digits;
  if (body.starts_with('-')) {
    negative = true;
    body.remove_prefix(1);
  }
  int base = 10;
  if (body.size() > 2 && body[0] == '0' && (body[1] == 'x' || body[1] == 'X')) {
    base = 16;
    body.remove_prefix(2);
  } else if (body.size() > 2 && body[0] == '0' && (body[1] == 'b' || body[1] == 'B')) {
    base = 2;
    body.remove_prefix(2);
  } else if (body.size() > 1 && body[0] == '0') {
    base = 8;
    body.remove_prefix(1);
  }
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), v, base);
  if (ec != std::errc{} || ptr != body.data() + body.size()) return std::nullopt;
  lit.value = negative ? -v : v;
  return lit;
}

std::vector<std::string> int_neighbours(const std::string &original) {
  const auto lit = parse_int(original);
  if (!lit) return {};
  constexpr auto kMax = std::numeric_limits<long long>::max();
  const long long n = lit->value;
  std::vector<long long> values;
  if (n < kMax) values.push_back(n + 1);
  if (n > -kMax) values.push_back(n - 1);
  values.push_back(0);
  values.push_back(1);
  if (n > -kMax) values.push_back(-n);
  std::vector<std::string> out;
  for (auto v : values) {
    auto s = std::to_string(v) + lit->suffix;
    if (std::ranges::find(out, s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

std::string format_float(double v, const std::string &suffix) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  std::string s(buf.data(), ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s + suffix;
}

std::vector<std::string> float_neighbours(std::string original) {
  std::string suffix;
  if (!original.empty() && std::string_view("fFdD").find(original.back()) != std::string_view::npos) {
    suffix = original.back();
    original.pop_back();
  }
  std::erase(original, '_');
  double x = 0;
  const auto [ptr, ec] = std::from_chars(original.data(), original.data() + original.size(), x);
  if (ec != std::errc{} || ptr != original.data() + original.size() || !std::isfinite(x)) return {};
  std::vector<std::string> out;
  for (double v : {x + 1.0, x - 1.0, 0.0, 1.0, -x}) {
    auto s = format_float(v == 0.0 ? 0.0 : v, suffix);
    if (std::ranges::find(out, s) == out.end()) out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> literal_neighbours(const MaskQuery &q) {
  switch (q.original_kind) {
  case TokenKind::IntLit: return int_neighbours(q.original);
  case TokenKind::FloatLit: return float_neighbours(q.original);
  case TokenKind::StringLit: return {"\"\"", "null"};
  case TokenKind::CharLit: return {"'\\0'", "'a'"};
  default: return {};
  }
}

std::vector<Prediction> rank(std::vector<std::string> candidates, std::size_t k) {
  std::vector<Prediction> out;
  for (std::size_t i = 0; i < candidates.size() && i < k; ++i)
    out.push_back({std::move(candidates[i]), 1.0 / static_cast<double>(i + 1)});
  return out;
}

struct ParsedEndpoint {
  std::string host;
  std::string prefix;
};

ParsedEndpoint parse_endpoint(const std::string &endpoint) {
  const auto scheme = endpoint.find("://");
  const auto path = endpoint.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  ParsedEndpoint p;
  p.host = endpoint.substr(0, path);
  if (path != std::string::npos) p.prefix = endpoint.substr(path);
  while (!p.prefix.empty() && p.prefix.back() == '/') p.prefix.pop_back();
  return p;
}

std::vector<Prediction> parse_candidates(const std::string &body, std::size_t k) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::MalformedResponse, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("candidates") || !doc["candidates"].is_array())
    throw Error(ErrorKind::MalformedResponse, "missing candidates array");
  std::vector<Prediction> out;
  double previous = std::numeric_limits<double>::infinity();
  for (const auto &c : doc["candidates"]) {
    if (!c.is_object() || !c.contains("token") || !c["token"].is_string() || !c.contains("score") ||
        !c["score"].is_number())
      throw Error(ErrorKind::MalformedResponse, "candidate must be {token: string, score: number}");
    const double score = c["score"].get<double>();
    if (!(score > 0.0 && score <= 1.0)) throw Error(ErrorKind::MalformedResponse, "score outside (0, 1]");
    if (score > previous) throw Error(ErrorKind::MalformedResponse, "candidates not sorted by score");
    previous = score;
    if (out.size() < k) out.push_back({c["token"].get<std::string>(), score});
  }
  return out;
}

} // namespace

std::string_view to_string(SiteKind kind) noexcept {
  switch (kind) {
  case SiteKind::Identifier: return "identifier";
  case SiteKind::FieldAccessName: return "field-access-name";
  case SiteKind::BinaryOperator: return "binary-operator";
  case SiteKind::Literal: return "literal";
  }
  return "?";
}

SiteKind site_kind_from_string(std::string_view name) {
  for (auto k : {SiteKind::Identifier, SiteKind::FieldAccessName, SiteKind::BinaryOperator, SiteKind::Literal})
    if (to_string(k) == name) return k;
  throw Error(ErrorKind::ConfigInvalid, "unknown site kind " + std::string(name));
}

std::size_t find_mask(std::span<const std::string> masked_seq) {
  std::optional<std::size_t> at;
  for (std::size_t i = 0; i < masked_seq.size(); ++i) {
    if (masked_seq[i] != kMaskToken) continue;
    if (at) throw Error(ErrorKind::MultipleMaskTokens, "more than one <mask> in query");
    at = i;
  }
  if (!at) throw Error(ErrorKind::NoMaskToken, "query has no <mask>");
  return *at;
}

std::vector<Prediction> predict_builtin(const MaskQuery &q) {
  find_mask(q.masked_seq);
  switch (q.site_kind) {
  case SiteKind::BinaryOperator: return rank(complement(q.original), q.k);
  case SiteKind::Identifier:
  case SiteKind::FieldAccessName: return rank(frequent_identifiers(q.scope_tokens), q.k);
  case SiteKind::Literal: return rank(literal_neighbours(q), q.k);
  }
  return {};
}

std::vector<Prediction> predict_remote(const std::string &endpoint, std::span<const std::string> masked_seq,
                                       std::size_t k, int timeout_ms) {
  find_mask(masked_seq);
  const auto ep = parse_endpoint(endpoint);
  const nlohmann::json request = {{"sequence", flatten_raw(masked_seq)}, {"k", k}};
  const auto payload = request.dump();

  std::string last_error;
  for (int attempt = 0; attempt < 2; ++attempt) {
    httplib::Client client(ep.host);
    const auto sec = timeout_ms / 1000;
    const auto usec = (timeout_ms % 1000) * 1000;
    client.set_connection_timeout(sec, usec);
    client.set_read_timeout(sec, usec);
    client.set_write_timeout(sec, usec);
    auto res = client.Post(ep.prefix + "/v1/predict", payload, "application/json");
    if (!res) {
      last_error = httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200)
      throw Error(ErrorKind::MalformedResponse, "HTTP " + std::to_string(res->status) + ": " + res->body);
    return parse_candidates(res->body, k);
  }
  throw Error(ErrorKind::PredictorUnavailable, endpoint + ": " + last_error);
}

bool RemotePredictor::healthy() const {
  const auto ep = parse_endpoint(endpoint_);
  httplib::Client client(ep.host);
  client.set_connection_timeout(timeout_ms_ / 1000, (timeout_ms_ % 1000) * 1000);
  auto res = client.Get(ep.prefix + "/v1/health");
  if (!res || res->status != 200) return false;
  const auto doc = nlohmann::json::parse(res->body, nullptr, false);
  return doc.is_object() && doc.value("status", "") == "ok";
}

} // namespace mimicry
