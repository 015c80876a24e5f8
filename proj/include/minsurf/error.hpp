#pragma once

#include <stdexcept>
#include <string>

namespace minsurf {

enum class ErrorCode {
  PointOutsideDomain,
  SegmentExitsDomain,
  ToleranceNotReached,
  GaussMapZero,
  DegenerateMetric,
  IdenticallyZero,
  NotZeroFree,
  ConstraintViolated,
  ZeroDetected,
  IllConditioned,
  DegreeExhausted,
  Precondition,
  DisconnectedGrid,
  NonPositiveFactor,
  StepFailed,
  ConfigInvalid,
};

const char* to_string(ErrorCode code) noexcept;

// All library failures are reported through this exception; `code()` lets
// callers (the CLI, the pipeline retry loops) branch on the failure kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace minsurf
