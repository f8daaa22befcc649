#pragma once

#include <stdexcept>
#include <string>

namespace tpb {

// Error taxonomy shared by all modules. The C API maps these onto
// coarse status codes; inside the library we throw.
enum class ErrorCode {
  invalid_argument,
  io,
  // data / design contract violations
  stratum_count_mismatch,
  missing_payload,
  empty_stratum,
  degenerate_stratum,
  dimension_mismatch,
  // numerical failures
  collinear,
  singular_jacobian,
  singular_moment,
  singular_information,
  no_convergence,
  no_events,
  separation_detected,
  variant_requires_weights,
  too_few_replicates,
  too_large,
  internal,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool ok, ErrorCode code, const std::string& message) {
  if (!ok) fail(code, message);
}

}  // namespace tpb
