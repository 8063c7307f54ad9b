#pragma once

#include <stdexcept>
#include <string>

namespace bmc {

enum class ErrorKind {
  DimensionMismatch,
  SpaceMismatch,
  Unsupported,
  InvalidArgument,
  Numerical,
  Config,
};

const char* to_string(ErrorKind kind);

/// Structured error carrying a machine-readable kind next to the message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }
  /// The message without the kind prefix.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorKind kind_;
  std::string message_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool cond, ErrorKind kind, const char* what) {
  if (!cond) fail(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace bmc
