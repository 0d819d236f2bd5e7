#pragma once

#include <stdexcept>
#include <string>

namespace isleflow {

enum class ErrorCode {
  InvalidArgument,
  Cfl,
  Solver,
  Io,
  Format,
  OutOfRange,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

// Raised when a requested time step exceeds the advective CFL bound.
// Carries the number of equal substeps that would satisfy the bound.
class CflError : public Error {
 public:
  CflError(const std::string& message, int required_substeps)
      : Error(ErrorCode::Cfl, message), required_substeps_(required_substeps) {}

  int required_substeps() const { return required_substeps_; }

 private:
  int required_substeps_;
};

}  // namespace isleflow
