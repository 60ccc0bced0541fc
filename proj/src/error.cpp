#include "kspin/error.hpp"

namespace kspin {

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::InvalidTuple:
    case ErrorKind::InvalidSample:
    case ErrorKind::Shape:
    case ErrorKind::Parse:
      return 1;
    case ErrorKind::Capability:
    case ErrorKind::InvalidModel:
    case ErrorKind::GenerationFailure:
    case ErrorKind::Numeric:
      return 2;
    case ErrorKind::Io:
      return 3;
  }
  return 2;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::InvalidTuple: return "invalid-tuple";
    case ErrorKind::InvalidSample: return "invalid-sample";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Capability: return "capability";
    case ErrorKind::InvalidModel: return "invalid-model";
    case ErrorKind::GenerationFailure: return "generation-failure";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace kspin
