#include "t2bfa/error.hpp"

namespace t2bfa {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MissingMonth: return "MissingMonth";
    case ErrorCode::MalformedNumber: return "MalformedNumber";
    case ErrorCode::OrderViolation: return "OrderViolation";
    case ErrorCode::MonthOutOfRange: return "MonthOutOfRange";
    case ErrorCode::InvalidValue: return "InvalidValue";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::GradeOutOfSmoothRange: return "GradeOutOfSmoothRange";
    case ErrorCode::DegenerateRange: return "DegenerateRange";
    case ErrorCode::TooFewPlanes: return "TooFewPlanes";
    case ErrorCode::EmptyCut: return "EmptyCut";
    case ErrorCode::EmptyInterval: return "EmptyInterval";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
    case ErrorCode::NonFiniteResult: return "NonFiniteResult";
    case ErrorCode::OddPopulation: return "OddPopulation";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::IncompleteBundle: return "IncompleteBundle";
    case ErrorCode::FileNotFound: return "FileNotFound";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::SelfTestFailed: return "SelfTestFailed";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NonFiniteResult:
    case ErrorCode::IoFailure:
    case ErrorCode::SelfTestFailed:
      return false;
    default:
      return true;
  }
}

namespace {

std::string compose(ErrorCode code, const std::string& message, std::optional<std::size_t> line) {
  std::string out{to_string(code)};
  if (line) out += " (line " + std::to_string(*line) + ")";
  out += ": ";
  out += message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line)
    : std::runtime_error(compose(code, message, line)), code_(code), line_(line), detail_(message) {}

}  // namespace t2bfa
