#include "jjwash/half_cell.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include <boost/math/tools/roots.hpp>
#include <unsupported/Eigen/Polynomials>

#include "jjwash/cell.hpp"
#include "jjwash/error.hpp"
#include "jjwash/text_format.hpp"
#include "jjwash/transform.hpp"

namespace jjwash::half {

using Eigen::Vector3d;

namespace {

const double sqrt2 = std::sqrt(2.0);
constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

}  // namespace

TiltedPotential potential(double current_x, double current_y, double omega_noise) {
  static const FrustrationCell cell = builtin_cell("1/2");
  static const TransformMatrix t = derive_transform(cell);
  return build_potential(cell, t, current_x, current_y, omega_noise);
}

Vector3d stationary_residuals(const Vector3d& v, double current_x, double current_y) {
  const double x = v(0) / sqrt2;
  const double y = v(1) / sqrt2;
  const double h = v(2) / 2;
  return {-sqrt2 * std::sin(h) * std::sin(x) - current_x / sqrt2,
          sqrt2 * std::cos(h) * std::sin(y) - current_y / sqrt2,
          std::cos(h) * std::cos(x) + std::sin(h) * std::cos(y)};
}

double defining_relation(double x, double ratio) {
  const double s = std::sin(sqrt2 * x);
  const double c = std::cos(x / sqrt2);
  const double inner = 1.0 - ratio * ratio * s * s;
  if (inner < 0.0) return nan;
  return s / std::sqrt(0.5 * (1.0 + std::sqrt(inner)) + c * c);
}

AuxiliaryCheck check_auxiliary_relations(const Vector3d& v, double current_x,
                                         double current_y) {
  AuxiliaryCheck check;
  const double ratio = current_x != 0.0 ? current_y / current_x : nan;
  check.defining = defining_relation(v(0), ratio) - current_x;
  check.tangent =
      std::tan(v(2) / 2) + std::cos(v(0) / sqrt2) / std::cos(v(1) / sqrt2);
  const double sy = std::sin(v(1) / sqrt2);
  check.sine_ratio = sy != 0.0 ? std::sin(v(0) / sqrt2) / sy - ratio * ratio : nan;
  return check;
}

CriticalPoint critical_current_uniaxial() {
  CriticalPoint cp;
  cp.x = std::acos(2 * sqrt2 - 3) / sqrt2;
  cp.z = -2 * std::asin(std::sqrt((2 - sqrt2) / 2));
  cp.current = std::sqrt(2 * sqrt2) * std::sqrt(3 * sqrt2 - 4);

  // Maximise h(u) = sin(2u)/sqrt(1 + cos^2 u), u = x/sqrt2, through the root
  // of h'(u) on [pi/4, pi/2] where h' changes sign.
  auto slope = [](double u) {
    const double c = std::cos(u);
    const double w = 1.0 + c * c;
    return 2 * std::cos(2 * u) / std::sqrt(w) +
           std::sin(2 * u) * c * std::sin(u) / (w * std::sqrt(w));
  };
  std::uintmax_t max_iter = 200;
  const auto bracket = boost::math::tools::toms748_solve(
      slope, pi / 4, pi / 2, boost::math::tools::eps_tolerance<double>(52), max_iter);
  const double u = 0.5 * (bracket.first + bracket.second);
  cp.x_numeric = sqrt2 * u;
  cp.current_numeric = defining_relation(cp.x_numeric, 0.0);
  // tan(z/2) = -cos(x/sqrt2) at y = 0, on the branch with cos(z/2) > 0.
  cp.z_numeric = -2 * std::atan(std::cos(u));

  const double worst = std::max({std::abs(cp.x - cp.x_numeric),
                                 std::abs(cp.z - cp.z_numeric),
                                 std::abs(cp.current - cp.current_numeric)});
  if (worst > 1e-8) {
    throw Error(ErrorKind::cross_validation_failed,
                "critical point closed form and maximisation differ by " +
                    text::format_real(worst));
  }
  return cp;
}

std::array<double, 5> boundary_quartic(double current_x, double ratio) {
  const double i2 = current_x * current_x;
  const double q = i2 * i2 * (1 - ratio * ratio) / 4;
  return {1.0, i2, 2 * (i2 - 1) + q, (i2 - 1) * i2, (i2 - 1) * (i2 - 1) - q};
}

std::array<double, 4> boundary_cubic(double current_x, double ratio) {
  const double i2 = current_x * current_x;
  const double q = i2 * i2 * (1 - ratio * ratio) / 4;
  return {1.0, i2 - 1, i2 - 1 + q, 1 - 2 * i2 + i2 * i2 - q};
}

double cubic_discriminant(const std::array<double, 4>& k) {
  const auto [a, b, c, d] = k;
  return 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c - 4 * a * c * c * c -
         27 * a * a * d * d;
}

std::string_view to_string(BoundaryMethod m) {
  return m == BoundaryMethod::discriminant ? "discriminant" : "continuation";
}

namespace {

// Mean of the two closest roots of the cubic (the pair that merges).
double merging_root(const std::array<double, 4>& k) {
  Eigen::Vector4d ascending(k[3], k[2], k[1], k[0]);
  Eigen::PolynomialSolver<double, 3> solver(ascending);
  const auto& roots = solver.roots();
  double best = std::numeric_limits<double>::infinity();
  double root = nan;
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      const double gap = std::abs(roots(i) - roots(j));
      if (gap < best) {
        best = gap;
        root = 0.5 * (roots(i).real() + roots(j).real());
      }
    }
  }
  return root;
}

[[noreturn]] void branch_lost(double ratio, const std::string& why) {
  throw Error(ErrorKind::root_branch_lost,
              "R = " + text::format_real(ratio) + ": " + why);
}

}  // namespace

double boundary_by_discriminant(double ratio, const BoundaryOptions& options,
                                double* root) {
  auto disc = [ratio](double current) {
    return cubic_discriminant(boundary_cubic(current, ratio));
  };
  double lo = options.scan_start;
  if (!(disc(lo) > 0.0)) branch_lost(ratio, "no three-root region at the scan start");
  double hi = lo;
  while (disc(hi) > 0.0) {
    lo = hi;
    hi += options.scan_step;
    if (hi > options.scan_end) branch_lost(ratio, "no discriminant sign change in scan range");
  }
  while (hi - lo > options.bisection_tol) {
    const double mid = 0.5 * (lo + hi);
    (disc(mid) > 0.0 ? lo : hi) = mid;
  }
  const double current = 0.5 * (lo + hi);
  const double c = merging_root(boundary_cubic(current, ratio));
  if (!(c >= -1.0 && c <= 1.0)) {
    branch_lost(ratio, "merging root " + text::format_real(c) + " is not a cosine");
  }
  if (root != nullptr) *root = c;
  return current;
}

double boundary_by_continuation(double ratio, const BoundaryOptions& options) {
  Eigen::VectorXd x = Vector3d(0.0, 0.0, -pi / 2);
  const TiltedPotential base = potential(0.0, 0.0);
  NewtonOptions newton;
  newton.max_iter = 100;
  double current = 0.0;
  double step = options.continuation_step;
  while (step > options.continuation_tol) {
    const double trial = current + step;
    bool accepted = false;
    try {
      const FixedPoint fp =
          find_fixed_point(base.with_drive(trial, ratio * trial, 0.0), x, newton);
      accepted = (fp.x - x).norm() < 0.5;
      if (accepted) x = fp.x;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::no_convergence) throw;
    }
    if (accepted) {
      current = trial;
    } else {
      step /= 2;
    }
  }
  return current;
}

PinnedBoundaryCurve pinned_boundary(std::span<const double> ratios,
                                    const BoundaryOptions& options) {
  std::vector<double> order(ratios.begin(), ratios.end());
  for (double r : order) {
    if (!(r >= 0.0 && r <= 1.0)) {
      throw Error(ErrorKind::validation_error,
                  "boundary ratio " + text::format_real(r) + " is outside [0, 1]");
    }
  }
  std::sort(order.begin(), order.end(), std::greater<>());

  PinnedBoundaryCurve curve;
  curve.method = BoundaryMethod::discriminant;
  double previous_root = nan;
  for (double r : order) {
    BoundarySample s;
    s.ratio = r;
    s.current_max = boundary_by_discriminant(r, options, &s.tracked_root);
    if (std::isfinite(previous_root) &&
        std::abs(s.tracked_root - previous_root) > options.max_root_jump) {
      branch_lost(r, "tracked root jumped from " + text::format_real(previous_root) +
                         " to " + text::format_real(s.tracked_root));
    }
    previous_root = s.tracked_root;
    s.continuation = nan;
    s.residual = nan;
    if (options.cross_validate) {
      s.continuation = boundary_by_continuation(r, options);
      s.residual = std::abs(s.current_max - s.continuation);
      if (s.residual > options.agreement) {
        throw Error(ErrorKind::cross_validation_failed,
                    "R = " + text::format_real(r) + ": discriminant " +
                        text::format_real(s.current_max) + " vs continuation " +
                        text::format_real(s.continuation));
      }
    }
    curve.samples.push_back(s);
  }
  std::reverse(curve.samples.begin(), curve.samples.end());
  return curve;
}

std::vector<double> uniform_ratio_grid(std::size_t n) {
  if (n < 2) return {0.0};
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

}  // namespace jjwash::half
