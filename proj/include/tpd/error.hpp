#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tpd {

enum class ErrorKind {
  InvalidInput,
  InvalidConfig,
  SchemaMismatch,
  CorruptModel,
};

std::string_view to_string(ErrorKind kind);

/// Every failure the library reports carries one of the kinds above; the CLI
/// maps them onto exit codes.
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

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput:
      return "InvalidInput";
    case ErrorKind::InvalidConfig:
      return "InvalidConfig";
    case ErrorKind::SchemaMismatch:
      return "SchemaMismatch";
    case ErrorKind::CorruptModel:
      return "CorruptModel";
  }
  return "Unknown";
}

}  // namespace tpd
