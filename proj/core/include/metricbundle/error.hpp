#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace metricbundle {

enum class ErrorCode {
  DimensionMismatch,
  Singular,
  NotHermitian,
  NotPositiveDefinite,
  ConvergenceFailure,
  Syntax,
  UnknownFunction,
  UnknownVariable,
  Eval,
  NoPositiveDefiniteSolution,
  Schema,
  StepLimitExceeded,
  NonFinite,
  TagViolation,
  UnknownModel,
};

const char* to_string(ErrorCode code) noexcept;

// Numerical failures (Singular, NonFinite, ...) versus input problems
// (Schema, Syntax, ...). The command-line tool maps these onto exit codes.
bool is_numerical(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by the profile-expression parser and evaluator. `offset` is the
// byte offset into the source text of the offending token or node.
class ExprError : public Error {
 public:
  ExprError(ErrorCode code, std::size_t offset, const std::string& what)
      : Error(code, what + " at offset " + std::to_string(offset)),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Scenario document violations carry a JSON pointer to the failing field.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : Error(ErrorCode::Schema, pointer + ": " + what), pointer_(pointer) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class NonFiniteError : public Error {
 public:
  NonFiniteError(std::size_t node, const std::string& channel, double time)
      : Error(ErrorCode::NonFinite,
              "channel '" + channel + "' left the finite range at node " +
                  std::to_string(node) + " (t=" + std::to_string(time) + ")"),
        node_(node),
        channel_(channel) {}

  std::size_t node() const noexcept { return node_; }
  const std::string& channel() const noexcept { return channel_; }

 private:
  std::size_t node_;
  std::string channel_;
};

// No Hermitian positive-definite solution of G H = H^dagger G exists.
// `degenerate` is set when the best candidate is only semi-definite, the
// signature of an exceptional point.
class StationaryMetricError : public Error {
 public:
  StationaryMetricError(bool degenerate, const std::string& what)
      : Error(ErrorCode::NoPositiveDefiniteSolution, what),
        degenerate_(degenerate) {}

  bool degenerate() const noexcept { return degenerate_; }

 private:
  bool degenerate_;
};

}  // namespace metricbundle
