#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace aggsamp {

/// Failure categories raised by the library. Each maps to one named error of
/// the public contract so callers (and the CLI exit-code policy) can branch on
/// the kind without parsing messages.
enum class ErrorCode {
  DimensionMismatch,
  IndexOutOfRange,
  InvalidSupport,
  InvalidArgument,
  DefectiveOrIllConditioned,
  SingularSystem,
  ConditionsViolated,
  InvalidModel,
  SingularNoiseCovariance,
  SingularNormalEquations,
  NotPositiveDefinite,
  DegenerateEigenvalue,
  BudgetExceeded,
  Infeasible,
  NoConvergence,
  ZeroColumn,
  IsolatedNode,
  ConnectivityBudgetExceeded,
  MalformedTable,
  IOFailure,
  SchemaMismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// True for failures that stem from numerics (ill-conditioning, singular
/// systems) rather than from bad input or IO.
bool is_numerical(ErrorCode code) noexcept;

}  // namespace aggsamp
