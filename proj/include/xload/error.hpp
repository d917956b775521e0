#pragma once

#include <stdexcept>
#include <string>

namespace xload {

// Process exit codes used by the command-line front end.
enum class ErrorCode : int {
  kOk = 0,
  kPrecondition = 2,
  kNumeric = 3,
  kIo = 4,
};

const char* error_code_name(ErrorCode code);

// Base class for every error thrown by the library. Each error carries the
// exit code the CLI reports for it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Bad arguments or violated preconditions (caller error).
class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::kPrecondition, what) {}
};

// A state the object model forbids, e.g. K above k_max.
class InvalidState : public Error {
 public:
  explicit InvalidState(const std::string& what)
      : Error(ErrorCode::kPrecondition, what) {}
};

// DEATH or MOVE requested on an intercept-only basis.
class IllegalMove : public Error {
 public:
  explicit IllegalMove(const std::string& what)
      : Error(ErrorCode::kPrecondition, what) {}
};

// Optimizer, decomposition or sampler failures.
class NumericError : public Error {
 public:
  explicit NumericError(const std::string& what)
      : Error(ErrorCode::kNumeric, what) {}
};

// The RJS chain could not obtain a converged fit for too long.
class ChainStall : public NumericError {
 public:
  explicit ChainStall(const std::string& what) : NumericError(what) {}
};

// Conditioning slab of a credible band holds no data.
class EmptySlab : public Error {
 public:
  explicit EmptySlab(const std::string& what)
      : Error(ErrorCode::kPrecondition, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::kIo, what) {}
};

}  // namespace xload
