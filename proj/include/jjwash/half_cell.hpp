#pragma once

// Closed-form analysis of the f=1/2 cell in transformed variables (x, y, z):
// stationarity, the uniaxial critical current and the boundary of the pinned
// (zero-voltage) region in the (I_x, I_y) plane.

#include <array>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jjwash/potential.hpp"
#include "jjwash/stationary.hpp"

namespace jjwash::half {

/// The f=1/2 potential built from the catalog cell and its canonical D.
TiltedPotential potential(double current_x, double current_y, double omega_noise = 0.0);

/// dU/dx, dU/dy, dU/dz in closed form:
///   -sqrt2 sin(z/2) sin(x/sqrt2) - Ix/sqrt2
///    sqrt2 cos(z/2) sin(y/sqrt2) - Iy/sqrt2
///    cos(z/2) cos(x/sqrt2) + sin(z/2) cos(y/sqrt2)
Eigen::Vector3d stationary_residuals(const Eigen::Vector3d& x, double current_x,
                                     double current_y);

/// Left side of the relation that fixes x at a stationary point,
///   sin(sqrt2 x) / sqrt( (1 + sqrt(1 - R^2 sin^2(sqrt2 x)))/2 + cos^2(x/sqrt2) ),
/// equal to I_x at every stationary point with R = I_y / I_x.
double defining_relation(double x, double ratio);

struct AuxiliaryCheck {
  double defining = 0.0;  // defining_relation(x, R) - I_x
  double tangent = 0.0;   // tan(z/2) + cos(x/sqrt2)/cos(y/sqrt2)
  double sine_ratio = 0.0;  // sin(x/sqrt2)/sin(y/sqrt2) - R^2 (not expected to vanish)
};

/// Evaluates the auxiliary algebraic relations at a stationary point. NaN
/// where a relation is undefined (e.g. I_x = 0 or y = 0 for the sine ratio).
AuxiliaryCheck check_auxiliary_relations(const Eigen::Vector3d& x, double current_x,
                                         double current_y);

struct CriticalPoint {
  // Closed forms.
  double x = 0.0;
  double z = 0.0;
  double current = 0.0;
  // Independent numeric maximisation of the defining relation at R = 0.
  double x_numeric = 0.0;
  double z_numeric = 0.0;
  double current_numeric = 0.0;
};

/// Coalescence point of the minimum and the saddle for I_y = 0:
///   x = arccos(2 sqrt2 - 3)/sqrt2, z = -2 arcsin(sqrt((2 - sqrt2)/2)),
///   I = sqrt(12 - 8 sqrt2) = sqrt(2 sqrt2) sqrt(3 sqrt2 - 4).
/// Throws cross_validation_failed if the numeric and closed forms differ by
/// more than 1e-8.
CriticalPoint critical_current_uniaxial();

/// Monic quartic (c^4 + ...) and, after removing the root c = -1, cubic in
/// c = cos(sqrt2 x), coefficients highest degree first.
std::array<double, 5> boundary_quartic(double current_x, double ratio);
std::array<double, 4> boundary_cubic(double current_x, double ratio);

/// Discriminant of a c^3 + b c^2 + c c + d (positive: three real roots).
double cubic_discriminant(const std::array<double, 4>& coeffs);

enum class BoundaryMethod { discriminant, continuation };

std::string_view to_string(BoundaryMethod m);

struct BoundarySample {
  double ratio = 0.0;         // R = I_y / I_x
  double current_max = 0.0;   // largest pinned I_x
  double tracked_root = 0.0;  // double root c = cos(sqrt2 x) at the boundary
  double continuation = 0.0;  // cross-check value (NaN when not run)
  double residual = 0.0;      // |current_max - continuation|
};

struct PinnedBoundaryCurve {
  BoundaryMethod method = BoundaryMethod::discriminant;
  std::vector<BoundarySample> samples;  // sorted by ratio
};

struct BoundaryOptions {
  double scan_start = 0.5;
  double scan_step = 0.01;
  double scan_end = 2.0;
  double bisection_tol = 1e-10;
  double max_root_jump = 0.25;  // between neighbouring ratios
  bool cross_validate = true;
  double agreement = 2e-3;
  double continuation_step = 0.01;
  double continuation_tol = 1e-7;
};

/// Largest I_x at which the cubic keeps its two merging real roots. Writes
/// the double root to `root` when given. Throws root_branch_lost.
double boundary_by_discriminant(double ratio, const BoundaryOptions& options = {},
                                double* root = nullptr);

/// Follows the minimum from the ground state while ramping I_x at fixed R
/// until it disappears.
double boundary_by_continuation(double ratio, const BoundaryOptions& options = {});

/// Ratios must lie in [0, 1]. The double-root branch is tracked from R = 1
/// downwards; each point is cross-checked by continuation when enabled
/// (cross_validation_failed beyond `agreement`).
PinnedBoundaryCurve pinned_boundary(std::span<const double> ratios,
                                    const BoundaryOptions& options = {});

std::vector<double> uniform_ratio_grid(std::size_t n);

}  // namespace jjwash::half
