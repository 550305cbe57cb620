#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mimicry/lexer.hpp"

namespace mimicry {

inline constexpr std::string_view kMaskToken = "<mask>";

enum class SiteKind { Identifier, FieldAccessName, BinaryOperator, Literal };

std::string_view to_string(SiteKind kind) noexcept;
SiteKind site_kind_from_string(std::string_view name);

struct Prediction {
  std::string token;
  double score = 0.0;
  friend bool operator==(const Prediction &, const Prediction &) = default;
};

/// One masked position. `original` and `original_kind` describe the hidden
/// token; the builtin predictor needs them for operator families and literal
/// neighbours, a remote model only ever sees `masked_seq`.
struct MaskQuery {
  std::vector<std::string> masked_seq;
  SiteKind site_kind = SiteKind::Identifier;
  std::string original;
  TokenKind original_kind = TokenKind::Identifier;
  /// Identifier lexemes visible from the site, in source order.
  std::vector<std::string> scope_tokens;
  std::size_t k = 5;
};

class Predictor {
public:
  virtual ~Predictor() = default;
  virtual std::vector<Prediction> predict(const MaskQuery &query) = 0;
};

/// Deterministic stand-in for a masked language model.
///
/// Binary operators get the rest of their family in a fixed order, identifiers
/// the most frequent in-scope names, and integer literals n+1, n-1, 0, 1, -n.
/// Scores are 1/rank.
std::vector<Prediction> predict_builtin(const MaskQuery &query);

/// Client for the `/v1/predict` protocol. Retries once on transport failure.
std::vector<Prediction> predict_remote(const std::string &endpoint, std::span<const std::string> masked_seq,
                                       std::size_t k, int timeout_ms);

class BuiltinPredictor final : public Predictor {
public:
  std::vector<Prediction> predict(const MaskQuery &query) override { return predict_builtin(query); }
};

class RemotePredictor final : public Predictor {
public:
  explicit RemotePredictor(std::string endpoint, int timeout_ms = 10000)
      : endpoint_(std::move(endpoint)), timeout_ms_(timeout_ms) {}

  std::vector<Prediction> predict(const MaskQuery &query) override {
    return predict_remote(endpoint_, query.masked_seq, query.k, timeout_ms_);
  }

  bool healthy() const;

private:
  std::string endpoint_;
  int timeout_ms_;
};

/// Index of the single `<mask>` token. Throws NoMaskToken / MultipleMaskTokens.
std::size_t find_mask(std::span<const std::string> masked_seq);

} // namespace mimicry
