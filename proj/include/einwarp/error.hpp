#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace einwarp {

enum class ErrorCode {
  NonPositivePhi,
  BadDimension,
  OutOfDomain,
  StepTooLarge,
  DomainExhausted,
  WrongFamily,
  WrongRegime,
  InconsistentParams,
  SingularChartPoint,
  OutsideDomain,
  BadRange,
  MarginViolated,
  NonPositiveWarp,
  RankDeficient,
  DegenerateDelta,
  NotFlatNormal,
  FrameMismatch,
  NotNormalForm,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (tests, the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace einwarp
