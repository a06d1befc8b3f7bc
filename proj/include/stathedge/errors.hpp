#pragma once

#include <stdexcept>
#include <string>

namespace stathedge {

enum class ErrorKind {
  InvalidArgument,
  Config,
  Numerical,
  RedundantInstrument,
  Unsupported,
  StateMismatch,
  Simulation,
  Validation,
};

/// Base of every exception thrown by the library. The kind decides the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Config: return "config";
    case ErrorKind::Numerical: return "numerical";
    case ErrorKind::RedundantInstrument: return "redundant-instrument";
    case ErrorKind::Unsupported: return "unsupported";
    case ErrorKind::StateMismatch: return "state-mismatch";
    case ErrorKind::Simulation: return "simulation";
    case ErrorKind::Validation: return "validation";
  }
  return "unknown";
}

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) { throw Error(kind, msg); }

inline void require(bool cond, ErrorKind kind, const std::string& msg) {
  if (!cond) throw Error(kind, msg);
}

}  // namespace stathedge
