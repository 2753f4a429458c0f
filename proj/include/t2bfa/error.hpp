#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace t2bfa {

/// Failure kinds raised by the toolkit. Each maps to a CLI exit category.
enum class ErrorCode {
  // climate ingest
  MissingMonth,
  MalformedNumber,
  OrderViolation,
  MonthOutOfRange,
  InvalidValue,
  SchemaMismatch,
  // fuzzy modelling
  GradeOutOfSmoothRange,
  DegenerateRange,
  TooFewPlanes,
  EmptyCut,
  EmptyInterval,
  // problem / solver
  InvalidWeights,
  InvalidConfig,
  InfeasibleSpec,
  NonFiniteResult,
  OddPopulation,
  // metrics
  EmptyGrid,
  ZeroVector,
  // runner
  IncompleteBundle,
  FileNotFound,
  IoFailure,
  SelfTestFailed,
};

std::string_view to_string(ErrorCode code) noexcept;

/// True for errors caused by bad input (exit code 1); false for runtime failures (exit code 2).
bool is_validation_error(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::optional<std::size_t> line = std::nullopt);

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  /// 1-based source line for parse errors, when known.
  [[nodiscard]] std::optional<std::size_t> line() const noexcept { return line_; }
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::optional<std::size_t> line_;
  std::string detail_;
};

}  // namespace t2bfa
