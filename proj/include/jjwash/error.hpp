#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jjwash {

/// Failure categories. Each one maps to a distinct CLI exit code.
enum class ErrorKind {
  parse_error,
  validation_error,
  unsupported_frustration,
  dimension_mismatch,
  singular_incidence,
  asymmetric_target,
  not_positive_definite,
  canonical_mismatch,
  bad_slice_spec,
  no_convergence,
  root_branch_lost,
  cross_validation_failed,
  invalid_config,
  numerical_blowup,
  not_psd,
  empty_trajectory,
  missing_velocities,
  io_failure,
};

std::string_view to_string(ErrorKind kind);

/// Process exit code for a given failure (0 is reserved for success).
int exit_code(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace jjwash
