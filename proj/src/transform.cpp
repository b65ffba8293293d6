#include "jjwash/transform.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "jjwash/error.hpp"
#include "jjwash/text_format.hpp"

namespace jjwash {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

double max_abs(const MatrixXd& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double asymmetry(const MatrixXd& m) { return max_abs(m - m.transpose()); }

}  // namespace

TargetMatrix compute_target(const FrustrationCell& cell,
                            const TransformTolerances& tol) {
  const MatrixXd gram = cell.omega * cell.omega.transpose();
  const Eigen::JacobiSVD<MatrixXd> svd(gram);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  if (!(smallest > 0.0) || sv(0) / smallest > tol.max_condition) {
    throw Error(ErrorKind::singular_incidence,
                "omega omega^T is numerically singular (cell '" + cell.name + "')");
  }
  TargetMatrix target;
  target.S = cell.phi_dy * cell.omega.transpose() * gram.inverse();
  const double asym = asymmetry(target.S);
  if (asym > tol.algebraic) {
    throw Error(ErrorKind::asymmetric_target,
                "target matrix is not symmetric (max |S - S^T| = " +
                    text::format_real(asym) + "); the cell is inconsistent");
  }
  // Exact symmetrization; the residual is below tolerance.
  target.S = 0.5 * (target.S + target.S.transpose()).eval();
  return target;
}

TransformMatrix make_transform(const MatrixXd& D) {
  const Eigen::FullPivLU<MatrixXd> lu(D);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::not_positive_definite, "transform matrix is singular");
  }
  return {D, lu.inverse()};
}

TransformMatrix factor_transform(const TargetMatrix& target,
                                 const std::optional<MatrixXd>& canonical,
                                 const TransformTolerances& tol) {
  const MatrixXd twice = 2.0 * target.S;
  // Positive definiteness is a property of S itself, checked either way.
  const Eigen::LLT<MatrixXd> llt(twice);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorKind::not_positive_definite,
                "2S is not positive definite; no real D exists");
  }
  if (canonical) {
    if (canonical->rows() != twice.rows() || canonical->cols() != twice.cols()) {
      throw Error(ErrorKind::canonical_mismatch, "canonical D has the wrong shape");
    }
    const double mismatch =
        max_abs(canonical->transpose() * *canonical - twice);
    if (mismatch > tol.canonical) {
      throw Error(ErrorKind::canonical_mismatch,
                  "canonical D violates D^T D = 2S (max error " +
                      text::format_real(mismatch) + ")");
    }
    return make_transform(*canonical);
  }
  const MatrixXd L = llt.matrixL();
  return make_transform(L.transpose());
}

TransformMatrix derive_transform(const FrustrationCell& cell,
                                 const TransformTolerances& tol) {
  return factor_transform(compute_target(cell, tol), cell.canonical_D, tol);
}

AffineMap phase_map_x(const FrustrationCell& cell, const TransformMatrix& t) {
  // dPhi_k/dx_i = sum_j dPhi_k/dy_j (D^-1)_ji
  return {cell.phi_dy.transpose() * t.D_inv, cell.phase_offsets};
}

MatrixXd drift_coefficients(const FrustrationCell& cell, const TransformMatrix& t) {
  return 0.5 * t.D * cell.omega;
}

MatrixXd drift_jacobian_x(const FrustrationCell& cell, const TransformMatrix& t,
                          const VectorXd& x) {
  const AffineMap map = phase_map_x(cell, t);
  const VectorXd cosines = map(x).array().cos();
  // f_i = sum_k a_ik sin Phi_k(x) + const
  return drift_coefficients(cell, t) * cosines.asDiagonal() *
         map.linear;
}

MatrixXd drift_jacobian_y(const FrustrationCell& cell, const VectorXd& y) {
  const AffineMap map = phase_map_y(cell);
  const VectorXd cosines = map(y).array().cos();
  return 0.5 * cell.omega * cosines.asDiagonal() * map.linear;
}

ExactnessReport verify_exactness(const FrustrationCell& cell,
                                 const TransformMatrix& t, std::uint64_t seed,
                                 int n_points, const TransformTolerances& tol) {
  ExactnessReport report;
  report.n_points = n_points;
  const MatrixXd a = drift_coefficients(cell, t);
  const AffineMap map = phase_map_x(cell, t);
  report.coefficient_mismatch = max_abs(a - map.linear.transpose());
  report.coefficients_ok = report.coefficient_mismatch < tol.algebraic;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0 * std::numbers::pi,
                                              2.0 * std::numbers::pi);
  const auto n = static_cast<Eigen::Index>(cell.n_vars);
  for (int s = 0; s < n_points; ++s) {
    VectorXd y(n);
    for (Eigen::Index j = 0; j < n; ++j) y(j) = dist(rng);
    // Currents shift the drift by a constant and cannot affect Jacobians;
    // the same point is examined in both coordinate systems.
    const VectorXd x = t.D * y;
    report.x_asymmetry =
        std::max(report.x_asymmetry, asymmetry(drift_jacobian_x(cell, t, x)));
    report.y_asymmetry =
        std::max(report.y_asymmetry, asymmetry(drift_jacobian_y(cell, y)));
  }
  report.x_symmetric = report.x_asymmetry < tol.jacobian;
  return report;
}

}  // namespace jjwash
