#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mimicry {

enum class ErrorKind {
  // lexing
  UnterminatedLiteral,
  UnterminatedComment,
  InvalidCharacter,
  IndexOutOfRange,
  // mutant generation
  SpanMismatch,
  // predictors
  NoMaskToken,
  MultipleMaskTokens,
  PredictorUnavailable,
  MalformedResponse,
  // harness
  FileMissing,
  CloneDirty,
  ParserFailure,
  // semantics
  EmptyPoV,
  // embedder
  EmptyCorpus,
  NonFiniteLoss,
  SequenceTooLong,
  // classifier
  DegenerateDataset,
  DimensionMismatch,
  LengthMismatch,
  TooFewGroups,
  // pipeline
  MissingUpstreamArtifact,
  ConfigInvalid,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Single exception type for the library; `kind()` carries the error
/// category so callers can branch without a type hierarchy.
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &message);

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace mimicry
