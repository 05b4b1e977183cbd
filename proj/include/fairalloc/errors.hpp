// Error taxonomy shared across the library. Every failure the engine can
// report carries a machine-readable code so callers (CLI, experiment driver)
// can map it to exit codes or CSV status values without string matching.
#pragma once

#include <stdexcept>
#include <string>

namespace fairalloc {

enum class ErrorCode {
  malformed_profile,
  inconsistent_utilities,
  infeasible_capacities,
  incomplete_allocation,
  unsupported_sign_mode,
  no_feasible_completion,
  unsatisfiable_goal,
  budget_exceeded,
  parse_error,
  unknown_alternative,
  invalid_argument,
};

inline const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::malformed_profile: return "malformed_profile";
    case ErrorCode::inconsistent_utilities: return "inconsistent_utilities";
    case ErrorCode::infeasible_capacities: return "infeasible_capacities";
    case ErrorCode::incomplete_allocation: return "incomplete_allocation";
    case ErrorCode::unsupported_sign_mode: return "unsupported_sign_mode";
    case ErrorCode::no_feasible_completion: return "no_feasible_completion";
    case ErrorCode::unsatisfiable_goal: return "unsatisfiable_goal";
    case ErrorCode::budget_exceeded: return "budget_exceeded";
    case ErrorCode::parse_error: return "parse_error";
    case ErrorCode::unknown_alternative: return "unknown_alternative";
    case ErrorCode::invalid_argument: return "invalid_argument";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace fairalloc
