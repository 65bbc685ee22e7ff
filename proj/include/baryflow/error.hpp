#pragma once

#include <stdexcept>
#include <string>

namespace baryflow {

enum class ErrorKind {
  InvalidArgument,
  Io,
  Format,
  Config,
  Validation,
  Lookup,
  Shape,
  DegenerateInput,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Io: return "io-error";
    case ErrorKind::Format: return "format-error";
    case ErrorKind::Config: return "config-error";
    case ErrorKind::Validation: return "validation-error";
    case ErrorKind::Lookup: return "lookup-error";
    case ErrorKind::Shape: return "shape-error";
    case ErrorKind::DegenerateInput: return "degenerate-input";
  }
  return "error";
}

// Every failure raised by the library carries a kind so the CLI can map it
// onto its exit-code contract.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace baryflow
