#pragma once

#include <stdexcept>
#include <string>

namespace kspin {

enum class ErrorKind {
  InvalidArgument,
  InvalidTuple,
  InvalidSample,
  Shape,
  Parse,
  Capability,
  InvalidModel,
  GenerationFailure,
  Numeric,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for an error kind: 1 validation, 2 runtime/numeric, 3 I/O.
int exit_code(ErrorKind kind) noexcept;

const char* to_string(ErrorKind kind) noexcept;

}  // namespace kspin
