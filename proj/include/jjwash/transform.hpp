#pragma once

#include <cstdint>
#include <optional>

#include <Eigen/Dense>

#include "jjwash/cell.hpp"

namespace jjwash {

struct TransformTolerances {
  double algebraic = 1e-12;      // symmetry of S, D^T D = 2S, D D^-1 = I
  double jacobian = 1e-10;       // drift Jacobian symmetry in x
  double canonical = 1e-10;      // acceptance of a supplied D
  double max_condition = 1e12;   // cond(omega omega^T)
};

/// S = phi_dy * omega^T * (omega omega^T)^-1, the right-hand side of the
/// condition (1/2) D^T D = S.
struct TargetMatrix {
  Eigen::MatrixXd S;
};

/// x = D y. D is determined only up to a left orthogonal factor: any Q D with
/// Q^T Q = I satisfies the same condition.
struct TransformMatrix {
  Eigen::MatrixXd D;
  Eigen::MatrixXd D_inv;
};

/// Throws singular_incidence or asymmetric_target.
TargetMatrix compute_target(const FrustrationCell& cell,
                            const TransformTolerances& tol = {});

/// Uses `canonical` when given (after checking it against 2S, otherwise
/// canonical_mismatch); else returns the transposed lower Cholesky factor of
/// 2S. Throws not_positive_definite.
TransformMatrix factor_transform(const TargetMatrix& target,
                                 const std::optional<Eigen::MatrixXd>& canonical,
                                 const TransformTolerances& tol = {});

/// Wraps an arbitrary D (e.g. Q * D) without any checks beyond invertibility.
TransformMatrix make_transform(const Eigen::MatrixXd& D);

/// Convenience: target + factorization with the cell's canonical D.
TransformMatrix derive_transform(const FrustrationCell& cell,
                                 const TransformTolerances& tol = {});

/// x -> Phi. Jacobian is phi_dy^T-equivalent pulled back through D^-1.
AffineMap phase_map_x(const FrustrationCell& cell, const TransformMatrix& t);

/// Drift coefficients a = (1/2) D omega (row i, column k).
Eigen::MatrixXd drift_coefficients(const FrustrationCell& cell,
                                   const TransformMatrix& t);

/// d f_i / d x_m of the transformed drift at x (currents only shift f).
Eigen::MatrixXd drift_jacobian_x(const FrustrationCell& cell,
                                 const TransformMatrix& t,
                                 const Eigen::VectorXd& x);

/// d g_j / d y_i of the untransformed drift at y.
Eigen::MatrixXd drift_jacobian_y(const FrustrationCell& cell,
                                 const Eigen::VectorXd& y);

struct ExactnessReport {
  double coefficient_mismatch = 0.0;  // max |a_ik - dPhi_k/dx_i|
  double x_asymmetry = 0.0;           // max |J - J^T|, transformed drift
  double y_asymmetry = 0.0;           // max |J - J^T|, original drift
  int n_points = 0;
  bool coefficients_ok = false;
  bool x_symmetric = false;

  bool passed() const { return coefficients_ok && x_symmetric; }
};

ExactnessReport verify_exactness(const FrustrationCell& cell,
                                 const TransformMatrix& t,
                                 std::uint64_t seed = 7, int n_points = 20,
                                 const TransformTolerances& tol = {});

}  // namespace jjwash
