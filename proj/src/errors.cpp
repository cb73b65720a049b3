#include "selfsim/errors.hpp"

namespace selfsim {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::StepUnderflow: return "StepUnderflow";
    case ErrorKind::GuardTripped: return "GuardTripped";
    case ErrorKind::MaxStepsExceeded: return "MaxStepsExceeded";
    case ErrorKind::OutOfSpan: return "OutOfSpan";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::MonotonicityViolated: return "MonotonicityViolated";
    case ErrorKind::PositivityLost: return "PositivityLost";
    case ErrorKind::ZeroCrossing: return "ZeroCrossing";
    case ErrorKind::MatchFailure: return "MatchFailure";
    case ErrorKind::WindowTooShort: return "WindowTooShort";
    case ErrorKind::NonPositiveValues: return "NonPositiveValues";
    case ErrorKind::CoverageGap: return "CoverageGap";
    case ErrorKind::MissingTailFit: return "MissingTailFit";
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::UnknownKey: return "UnknownKey";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace selfsim
