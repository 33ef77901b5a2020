#pragma once

#include <stdexcept>
#include <string>

namespace nhse {

// Machine-readable failure categories. The CLI prints them as
// `ERROR <code>: <message>`.
enum class ErrorCode {
  DimensionError,
  LatticeTooSmall,
  InvariantViolation,
  ParseError,
  SolverError,
  AmbiguousSelector,
  NoMatch,
  DegenerateFit,
  NotDegenerate,
  NoIntertwiner,
  NonIntegerPhase,
  TooSingular,
  MaxIterations,
  BranchAmbiguity,
  PairingFailure,
  PartnerNotFound,
  PreconditionFailed,
  UnknownId,
  UnknownParameter,
  InvalidArgument,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace nhse
