#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace abc {

// Failure categories raised by the toolkit. The CLI maps every code except
// Usage to exit status 1.
enum class ErrorCode {
  InvalidArgument,
  StepUnderflow,
  MaxTimeExceeded,
  NoEventBeforeMaxTime,
  OutOfRange,
  NoConvergence,
  ResonantMode,
  NotContracting,
  NonMonotone,
  NoCrossing,
  NoSignChange,
  VerificationFailed,
  BadIndex,
  BadBranch,
  TooShort,
  EmptyData,
  Usage,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace abc
