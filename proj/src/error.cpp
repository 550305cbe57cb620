#include "mimicry/error.hpp"

namespace mimicry {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
  case ErrorKind::UnterminatedLiteral: return "UnterminatedLiteral";
  case ErrorKind::UnterminatedComment: return "UnterminatedComment";
  case ErrorKind::InvalidCharacter: return "InvalidCharacter";
  case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
  case ErrorKind::SpanMismatch: return "SpanMismatch";
  case ErrorKind::NoMaskToken: return "NoMaskToken";
  case ErrorKind::MultipleMaskTokens: return "MultipleMaskTokens";
  case ErrorKind::PredictorUnavailable: return "PredictorUnavailable";
  case ErrorKind::MalformedResponse: return "MalformedResponse";
  case ErrorKind::FileMissing: return "FileMissing";
  case ErrorKind::CloneDirty: return "CloneDirty";
  case ErrorKind::ParserFailure: return "ParserFailure";
  case ErrorKind::EmptyPoV: return "EmptyPoV";
  case ErrorKind::EmptyCorpus: return "EmptyCorpus";
  case ErrorKind::NonFiniteLoss: return "NonFiniteLoss";
  case ErrorKind::SequenceTooLong: return "SequenceTooLong";
  case ErrorKind::DegenerateDataset: return "DegenerateDataset";
  case ErrorKind::DimensionMismatch: return "DimensionMismatch";
  case ErrorKind::LengthMismatch: return "LengthMismatch";
  case ErrorKind::TooFewGroups: return "TooFewGroups";
  case ErrorKind::MissingUpstreamArtifact: return "MissingUpstreamArtifact";
  case ErrorKind::ConfigInvalid: return "ConfigInvalid";
  case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

} // namespace mimicry
