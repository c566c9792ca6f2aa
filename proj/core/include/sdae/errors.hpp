#pragma once

#include <stdexcept>
#include <string>

namespace sdae {

enum class ErrorCode {
  NonFinite,
  NotRegular,
  IllConditioned,
  DimensionMismatch,
  QuadratureFailure,
  OrderTooHigh,
  NotNormalized,
  SingularNormalization,
  ZeroTestFunction,
  SingularD,
  TooFewSamples,
  GridTooCoarse,
  InvalidArc,
  InconsistentNetwork,
  ParseError,
};

// All library failures surface as Error; `code` classifies them so callers
// (notably the CLI) can map domain errors vs. input errors to exit codes
// without string matching.
class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

const char* error_code_name(ErrorCode code) noexcept;

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, std::string(error_code_name(code)) + ": " + msg);
}

} // namespace sdae
