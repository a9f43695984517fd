#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ratiodelay {

enum class ErrorCode {
  Validation,
  Domain,
  NoSurvival,
  NoPositiveEquilibrium,
  Singularity,
  UnsupportedDimension,
  NumericFailure,
  BudgetExceeded,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Domain: return "domain";
    case ErrorCode::NoSurvival: return "no_survival";
    case ErrorCode::NoPositiveEquilibrium: return "no_positive_equilibrium";
    case ErrorCode::Singularity: return "singularity";
    case ErrorCode::UnsupportedDimension: return "unsupported_dimension";
    case ErrorCode::NumericFailure: return "numeric_failure";
    case ErrorCode::BudgetExceeded: return "budget_exceeded";
  }
  return "unknown";
}

/// Base error for every failure the toolkit reports. `condition` names the
/// model condition that was violated (empty when none applies).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string condition, const std::string& message)
      : std::runtime_error(message), code_(code), condition_(std::move(condition)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& condition() const noexcept { return condition_; }

 private:
  ErrorCode code_;
  std::string condition_;
};

// Condition labels shared by error messages, reports and the HTTP API.
namespace condition {
inline constexpr const char* kSurvival = "survival: m_i > d_i";
inline constexpr const char* kPositiveEquilibrium = "positive equilibrium: r > sum_i d_i u_i*";
inline constexpr const char* kPositiveState = "state in open positive orthant";
inline constexpr const char* kPositiveParams = "parameters strictly positive";
inline constexpr const char* kTwoPredators = "n = 2";
inline constexpr const char* kMemoryRate = "memory rate alpha > 0 present";
inline constexpr const char* kSignPattern = "sign pattern: a11 <= 0, p_i' < 0, -d_i - u_i p_i' < 0";
}  // namespace condition

}  // namespace ratiodelay
