#include "aggsamp/errors.hpp"

namespace aggsamp {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidSupport: return "InvalidSupport";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::DefectiveOrIllConditioned: return "DefectiveOrIllConditioned";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::ConditionsViolated: return "ConditionsViolated";
    case ErrorCode::InvalidModel: return "InvalidModel";
    case ErrorCode::SingularNoiseCovariance: return "SingularNoiseCovariance";
    case ErrorCode::SingularNormalEquations: return "SingularNormalEquations";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DegenerateEigenvalue: return "DegenerateEigenvalue";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::ZeroColumn: return "ZeroColumn";
    case ErrorCode::IsolatedNode: return "IsolatedNode";
    case ErrorCode::ConnectivityBudgetExceeded: return "ConnectivityBudgetExceeded";
    case ErrorCode::MalformedTable: return "MalformedTable";
    case ErrorCode::IOFailure: return "IOFailure";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DefectiveOrIllConditioned:
    case ErrorCode::SingularSystem:
    case ErrorCode::ConditionsViolated:
    case ErrorCode::SingularNoiseCovariance:
    case ErrorCode::SingularNormalEquations:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::DegenerateEigenvalue:
    case ErrorCode::Infeasible:
    case ErrorCode::NoConvergence:
    case ErrorCode::ZeroColumn:
    case ErrorCode::IsolatedNode:
    case ErrorCode::ConnectivityBudgetExceeded:
      return true;
    default:
      return false;
  }
}

}  // namespace aggsamp
