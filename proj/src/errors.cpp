#include "panelshock/errors.hpp"

namespace panelshock {

const char* to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::ParseError: return "ParseError";
    case ErrorCategory::MissingCoverage: return "MissingCoverage";
    case ErrorCategory::OutOfRange: return "OutOfRange";
    case ErrorCategory::RangeMismatch: return "RangeMismatch";
    case ErrorCategory::ConfigError: return "ConfigError";
    case ErrorCategory::InvalidWeight: return "InvalidWeight";
    case ErrorCategory::RankDeficient: return "RankDeficient";
    case ErrorCategory::DegenerateAngle: return "DegenerateAngle";
    case ErrorCategory::ZeroVariance: return "ZeroVariance";
    case ErrorCategory::NoSolution: return "NoSolution";
    case ErrorCategory::InsufficientSample: return "InsufficientSample";
    case ErrorCategory::SingularDesign: return "SingularDesign";
    case ErrorCategory::NonPsdPosteriorScale: return "NonPsdPosteriorScale";
    case ErrorCategory::CholeskyFailure: return "CholeskyFailure";
    case ErrorCategory::EmptySample: return "EmptySample";
    case ErrorCategory::CollinearShocks: return "CollinearShocks";
    case ErrorCategory::ExplosiveDgp: return "ExplosiveDgp";
    case ErrorCategory::Internal: return "Internal";
  }
  return "Unknown";
}

int exit_code(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::ParseError:
    case ErrorCategory::MissingCoverage:
    case ErrorCategory::OutOfRange:
    case ErrorCategory::RangeMismatch:
      return 2;
    case ErrorCategory::ConfigError:
    case ErrorCategory::InvalidWeight:
      return 3;
    default:
      return 1;
  }
}

}  // namespace panelshock
