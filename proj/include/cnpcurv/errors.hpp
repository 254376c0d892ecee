#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace cnpcurv {

// Every failure mode of the library. The numeric value is the CLI exit code.
enum class ErrorCode : int {
  CNPViolation = 2,
  PresetDomain = 3,
  HorizonExceeded = 4,
  Commutator = 5,
  Shape = 6,
  NotContraction = 7,
  TailUnbounded = 8,
  NotUnitary = 9,
  OutsideBall = 10,
  NearSingular = 11,
  NotPure = 12,
  ReconcileFailure = 13,
  IndexDegree = 14,
  Input = 15,
  IdentityFailure = 16,
};

std::string_view error_name(ErrorCode code) noexcept;

inline int exit_code(ErrorCode code) noexcept { return static_cast<int>(code); }

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail);

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace cnpcurv
