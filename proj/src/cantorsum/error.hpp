#pragma once

#include <stdexcept>
#include <string>

namespace cantorsum {

enum class ErrorCode {
  empty_system,
  ratio_out_of_range,
  orientation_out_of_range,
  no_convergence,
  invalid_digit,
  orientation_mismatch,
  no_shared_square,
  epsilon_too_large,
  search_exhausted,
  budget_exceeded,
  witness_unavailable,
  domain_error,
  nonpositive_eta,
  degenerate_system,
  parse_error,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cantorsum
