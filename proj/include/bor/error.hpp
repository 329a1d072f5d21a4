#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace bor {

enum class Errc {
  SingularMatrix,
  EmptyInput,
  DimensionMismatch,
  InvalidMdp,
  UnknownAction,
  OutOfUnitBox,
  NonConvergence,
  NotAFixedPoint,
  IterationCapExceeded,
  RegimeViolation,
  ZeroRow,
  PreconditionViolated,
  InvalidInput,
  ParseError,
  ValidationError,
};

constexpr std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::SingularMatrix: return "SingularMatrix";
    case Errc::EmptyInput: return "EmptyInput";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::InvalidMdp: return "InvalidMdp";
    case Errc::UnknownAction: return "UnknownAction";
    case Errc::OutOfUnitBox: return "OutOfUnitBox";
    case Errc::NonConvergence: return "NonConvergence";
    case Errc::NotAFixedPoint: return "NotAFixedPoint";
    case Errc::IterationCapExceeded: return "IterationCapExceeded";
    case Errc::RegimeViolation: return "RegimeViolation";
    case Errc::ZeroRow: return "ZeroRow";
    case Errc::PreconditionViolated: return "PreconditionViolated";
    case Errc::InvalidInput: return "InvalidInput";
    case Errc::ParseError: return "ParseError";
    case Errc::ValidationError: return "ValidationError";
  }
  return "Unknown";
}

/// Every failure in the library is reported as a bor::Error carrying a
/// machine-readable code next to the human-readable message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace bor
