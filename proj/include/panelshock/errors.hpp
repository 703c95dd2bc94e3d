#ifndef PANELSHOCK_ERRORS_HPP
#define PANELSHOCK_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace panelshock {

enum class ErrorCategory {
  // input / data errors
  ParseError,
  MissingCoverage,
  OutOfRange,
  RangeMismatch,
  // configuration errors
  ConfigError,
  InvalidWeight,
  // estimation / numerical errors
  RankDeficient,
  DegenerateAngle,
  ZeroVariance,
  NoSolution,
  InsufficientSample,
  SingularDesign,
  NonPsdPosteriorScale,
  CholeskyFailure,
  EmptySample,
  CollinearShocks,
  ExplosiveDgp,
  Internal,
};

const char* to_string(ErrorCategory c);

// Process exit codes: 0 ok, 1 estimation error, 2 input error, 3 config error.
int exit_code(ErrorCategory c);

class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const { return category_; }

 private:
  ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message) {
  throw Error(category, message);
}

}  // namespace panelshock

#endif
