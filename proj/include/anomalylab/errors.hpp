#pragma once

#include <stdexcept>
#include <string>

namespace anomalylab {

enum class ErrorCode {
  MixedParity,
  GrassmannExponent,
  InvalidExponent,
  ParityMismatch,
  CyclicRule,
  UnknownField,
  UnknownSymbol,
  MissingKernelEntry,
  NonConstantCentralCandidate,
  ClosureFailure,
  UnknownModel,
  SyntaxError,
  ValidationError,
  NonPolynomialDensity,
  CutoffExceeded,
  RescaleUnsupported,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_name(code)) + ": " + what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Parse failure with a 1-based source position.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& what)
      : Error(ErrorCode::SyntaxError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace anomalylab
