#include "cnpcurv/errors.hpp"

namespace cnpcurv {

std::string_view error_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::CNPViolation: return "CNPViolation";
    case ErrorCode::PresetDomain: return "PresetDomainError";
    case ErrorCode::HorizonExceeded: return "HorizonExceeded";
    case ErrorCode::Commutator: return "CommutatorError";
    case ErrorCode::Shape: return "ShapeError";
    case ErrorCode::NotContraction: return "NotContraction";
    case ErrorCode::TailUnbounded: return "TailUnbounded";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::OutsideBall: return "OutsideBall";
    case ErrorCode::NearSingular: return "NearSingular";
    case ErrorCode::NotPure: return "NotPure";
    case ErrorCode::ReconcileFailure: return "ReconcileFailure";
    case ErrorCode::IndexDegree: return "IndexDegreeError";
    case ErrorCode::Input: return "InputError";
    case ErrorCode::IdentityFailure: return "IdentityFailure";
  }
  return "UnknownError";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(error_name(code)) + ": " + detail),
      code_(code),
      detail_(detail) {}

}  // namespace cnpcurv
