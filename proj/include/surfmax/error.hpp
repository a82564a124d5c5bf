#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace surfmax {

enum class ErrorKind {
  Dimension,
  Domain,
  DegenerateGradient,
  DegenerateTriangle,
  InsufficientPoints,
  InsufficientData,
  InvalidSample,
  DegenerateFit,
  DegenerateSurface,
  Config,
  Protocol,
  OracleUnavailable,
  OracleFailure,
  Io,
};

std::string_view to_string(ErrorKind kind);

// Every failure raised by the library carries a kind so callers can branch
// on it (the attack falls back on DegenerateSurface, the CLI maps Config to
// exit code 1, and so on).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  // True for errors caused by user input rather than by a running oracle.
  bool is_config_error() const noexcept {
    return kind_ == ErrorKind::Config || kind_ == ErrorKind::Dimension;
  }

 private:
  ErrorKind kind_;
};

}  // namespace surfmax
