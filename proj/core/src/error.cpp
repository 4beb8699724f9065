#include "metricbundle/error.hpp"

namespace metricbundle {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::Singular: return "Singular";
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::UnknownFunction: return "UnknownFunction";
    case ErrorCode::UnknownVariable: return "UnknownVariable";
    case ErrorCode::Eval: return "EvalError";
    case ErrorCode::NoPositiveDefiniteSolution: return "NoPositiveDefiniteSolution";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::TagViolation: return "TagViolation";
    case ErrorCode::UnknownModel: return "UnknownModel";
  }
  return "Unknown";
}

bool is_numerical(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Singular:
    case ErrorCode::NotPositiveDefinite:
    case ErrorCode::ConvergenceFailure:
    case ErrorCode::Eval:
    case ErrorCode::StepLimitExceeded:
    case ErrorCode::NonFinite:
      return true;
    default:
      return false;
  }
}

}  // namespace metricbundle
