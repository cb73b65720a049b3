#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selfsim {

enum class ErrorKind {
  InvalidArgument,
  SingularPoint,
  StepUnderflow,
  GuardTripped,
  MaxStepsExceeded,
  OutOfSpan,
  NoBracket,
  MonotonicityViolated,
  PositivityLost,
  ZeroCrossing,
  MatchFailure,
  WindowTooShort,
  NonPositiveValues,
  CoverageGap,
  MissingTailFit,
  ZeroDenominator,
  UnknownKey,
  OutOfRange,
  Io,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Failure raised by any solver stage. The kind is stable and is what the CLI
/// reports; the message carries context (parameter values, paths, keys).
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace selfsim
