#pragma once

#include <stdexcept>
#include <string>

namespace nilcayley {

/// Process exit codes used by the CLI; each error class maps to one of them.
enum class ExitCode : int {
  ok = 0,
  precondition = 2,
  resource = 3,
  sampling = 4,
};

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual ExitCode exit_code() const noexcept = 0;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::precondition; }
};

class InvalidElementError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class NotGeneratingError : public PreconditionError {
 public:
  using PreconditionError::PreconditionError;
};

class ResourceError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::resource; }
};

class SamplingError : public Error {
 public:
  using Error::Error;
  ExitCode exit_code() const noexcept override { return ExitCode::sampling; }
};

}  // namespace nilcayley
