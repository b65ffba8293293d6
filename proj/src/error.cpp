#include "jjwash/error.hpp"

namespace jjwash {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::parse_error: return "ParseError";
    case ErrorKind::validation_error: return "ValidationError";
    case ErrorKind::unsupported_frustration: return "UnsupportedFrustration";
    case ErrorKind::dimension_mismatch: return "DimensionMismatch";
    case ErrorKind::singular_incidence: return "SingularIncidence";
    case ErrorKind::asymmetric_target: return "AsymmetricTarget";
    case ErrorKind::not_positive_definite: return "NotPositiveDefinite";
    case ErrorKind::canonical_mismatch: return "CanonicalMismatch";
    case ErrorKind::bad_slice_spec: return "BadSliceSpec";
    case ErrorKind::no_convergence: return "NoConvergence";
    case ErrorKind::root_branch_lost: return "RootBranchLost";
    case ErrorKind::cross_validation_failed: return "CrossValidationFailed";
    case ErrorKind::invalid_config: return "InvalidConfig";
    case ErrorKind::numerical_blowup: return "NumericalBlowup";
    case ErrorKind::not_psd: return "NotPSD";
    case ErrorKind::empty_trajectory: return "EmptyTrajectory";
    case ErrorKind::missing_velocities: return "MissingVelocities";
    case ErrorKind::io_failure: return "IOFailure";
  }
  return "Unknown";
}

int exit_code(ErrorKind kind) {
  // 1 is left for unexpected exceptions.
  return 10 + static_cast<int>(kind);
}

}  // namespace jjwash
