#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "helpers.hpp"
#include "jjwash/half_cell.hpp"
#include "jjwash/stationary.hpp"

using namespace jjwash;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;
using testing::error_kind_of;
using testing::max_abs;

namespace {

constexpr double pi = std::numbers::pi;
const double s2 = std::sqrt(2.0);
const double i_crit = std::sqrt(12 - 8 * s2);

// Minima reached from a 5^3 grid of seeds over one period.
int count_minima(double ix, double iy) {
  const TiltedPotential p = half::potential(ix, iy);
  int found = 0;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      for (int k = 0; k < 5; ++k) {
        const Vector3d seed = -p.period() / 2 +
                              Vector3d(i, j, k).cwiseProduct(p.period()) / 5.0;
        try {
          find_fixed_point(p, seed);
          ++found;
        } catch (const Error& e) {
          CHECK(e.kind() == ErrorKind::no_convergence);
        }
      }
    }
  }
  return found;
}

}  // namespace

TEST_CASE("ground state from a nearby seed") {
  const FixedPoint fp = find_fixed_point(half::potential(0, 0), Vector3d(0.1, -0.1, -1.4));
  CHECK(max_abs(fp.x - Vector3d(0, 0, -pi / 2)) < 1e-10);
  CHECK(fp.classification == Stability::minimum);
  CHECK(fp.residual < 1e-10);
}

TEST_CASE("minima at y = 0 satisfy the defining relation") {
  const FixedPoint fp = find_fixed_point(half::potential(0.4142, 0), Vector3d(0.1, 0.1, -1.5));
  CHECK(std::abs(fp.x(1)) < 1e-10);
  CHECK(fp.classification == Stability::minimum);
  const double u = fp.x(0) / s2;
  CHECK(std::abs(std::sin(s2 * fp.x(0)) / std::sqrt(1 + std::cos(u) * std::cos(u)) - 0.4142) <
        1e-8);
}

TEST_CASE("no minimum above the critical current") {
  CHECK(count_minima(0.9, 0.0) == 0);
  CHECK(count_minima(i_crit + 1e-3, 0.0) == 0);
  CHECK(count_minima(i_crit - 1e-2, 0.0) > 0);
  CHECK(count_minima(0.5, 0.0) > 0);
}

TEST_CASE("returned fixed points are consistent") {
  NewtonOptions opts;
  opts.target = FixedPointTarget::any_stationary;
  const TiltedPotential p = half::potential(0.3, 0.1);
  const std::vector<FixedPoint> points = sweep_fixed_points(p, 4, opts);
  REQUIRE(points.size() > 2);
  bool saw_saddle = false;
  for (const FixedPoint& fp : points) {
    CHECK(fp.residual < 1e-10);
    CHECK(max_abs(p.gradient(fp.x)) < 1e-10);
    const VectorXd eig = Eigen::SelfAdjointEigenSolver<MatrixXd>(p.hessian(fp.x)).eigenvalues();
    CHECK(classify(eig) == fp.classification);
    saw_saddle |= fp.classification == Stability::saddle;
  }
  CHECK(saw_saddle);
}

TEST_CASE("classification") {
  CHECK(classify(Eigen::Vector3d(1, 2, 3)) == Stability::minimum);
  CHECK(classify(Eigen::Vector3d(-1, 2, 3)) == Stability::saddle);
  CHECK(classify(Eigen::Vector3d(-1, -2, -3)) == Stability::maximum);
  CHECK(classify(Eigen::Vector3d(1e-9, 2, 3)) == Stability::degenerate);
}

TEST_CASE("stationary residuals at listed points") {
  CHECK(max_abs(half::stationary_residuals(Vector3d(0, 0, -pi / 2), 0, 0)) < 1e-15);

  const double xc = std::acos(2 * s2 - 3) / s2;
  const double zc = -2 * std::asin(std::sqrt((2 - s2) / 2));
  CHECK(max_abs(half::stationary_residuals(Vector3d(xc, 0, zc), i_crit, 0)) < 1e-12);

  const double q = pi / (2 * s2);
  CHECK(max_abs(half::stationary_residuals(Vector3d(q, q, -pi / 2), 1, 1)) < 1e-12);
}

TEST_CASE("critical current") {
  const half::CriticalPoint cp = half::critical_current_uniaxial();
  CHECK(std::abs(cp.current - i_crit) < 1e-12);
  CHECK(std::abs(cp.current - std::sqrt(2 * s2) * std::sqrt(3 * s2 - 4)) < 1e-12);
  CHECK(std::abs(cp.current - 0.8284271) < 1e-7);
  CHECK(std::abs(cp.current_numeric - cp.current) < 1e-8);
  CHECK(std::abs(cp.x_numeric - cp.x) < 1e-8);
  CHECK(std::abs(cp.z_numeric - cp.z) < 1e-8);
  CHECK(cp.x == doctest::Approx(1.2326443).epsilon(1e-7));
  CHECK(cp.z == doctest::Approx(-1.1437177).epsilon(1e-7));
}

TEST_CASE("transverse drive gives the same critical current") {
  // Below I_crit a minimum survives with the drive on y, above it none does.
  CHECK(count_minima(0.0, i_crit - 1e-2) > 0);
  CHECK(count_minima(0.0, i_crit + 1e-3) == 0);
}

TEST_CASE("defining relation and tangent relation hold at minima") {
  for (double ratio : {0.0, 0.3, 0.7}) {
    const double ix = 0.6;
    const FixedPoint fp =
        find_fixed_point(half::potential(ix, ratio * ix), Vector3d(0.3, 0.1, -1.2));
    const half::AuxiliaryCheck c =
        half::check_auxiliary_relations(fp.x, ix, ratio * ix);
    CHECK(std::abs(c.defining) < 1e-8);
    CHECK(std::abs(c.tangent) < 1e-8);
  }
}

TEST_CASE("the sine-ratio companion relation does not hold") {
  const FixedPoint fp = find_fixed_point(half::potential(0.8, 0.4), Vector3d(0.5, 0.2, -1.2));
  const half::AuxiliaryCheck c = half::check_auxiliary_relations(fp.x, 0.8, 0.4);
  CHECK(std::abs(c.sine_ratio) > 1.0);
}

TEST_CASE("boundary polynomials") {
  const double c = 2 * s2 - 3;
  const auto cubic = half::boundary_cubic(i_crit, 0.0);
  const double value = ((cubic[0] * c + cubic[1]) * c + cubic[2]) * c + cubic[3];
  CHECK(std::abs(value) < 1e-10);
  const auto quartic = half::boundary_quartic(i_crit, 0.0);
  const double qv = (((quartic[0] * c + quartic[1]) * c + quartic[2]) * c + quartic[3]) * c +
                    quartic[4];
  CHECK(std::abs(qv) < 1e-10);
  // The quartic is (c + 1) times the cubic.
  for (double r : {0.0, 0.4, 1.0}) {
    const auto k3 = half::boundary_cubic(0.9, r);
    const auto k4 = half::boundary_quartic(0.9, r);
    CHECK(k4[0] == doctest::Approx(k3[0]));
    CHECK(k4[1] == doctest::Approx(k3[1] + k3[0]));
    CHECK(k4[2] == doctest::Approx(k3[2] + k3[1]));
    CHECK(k4[3] == doctest::Approx(k3[3] + k3[2]));
    CHECK(k4[4] == doctest::Approx(k3[3]));
  }
  // Discriminant of (c-1)(c-2)(c-3) = 4, of (c-1)^2 (c-2) = 0.
  CHECK(half::cubic_discriminant({1, -6, 11, -6}) == doctest::Approx(4.0));
  CHECK(half::cubic_discriminant({1, -4, 5, -2}) == doctest::Approx(0.0));
}

TEST_CASE("pinned boundary anchors and monotonicity") {
  const std::vector<double> grid = half::uniform_ratio_grid(101);
  const half::PinnedBoundaryCurve curve = half::pinned_boundary(grid);
  REQUIRE(curve.samples.size() == 101);
  CHECK(curve.samples.front().ratio == 0.0);
  CHECK(std::abs(curve.samples.front().current_max - i_crit) < 1e-6);
  CHECK(std::abs(curve.samples.back().current_max - 1.0) < 1e-6);
  CHECK(std::abs(curve.samples.back().tracked_root) < 1e-4);  // cos(sqrt2 x) at x = pi/(2 sqrt2)
  for (std::size_t i = 1; i < curve.samples.size(); ++i) {
    CHECK(curve.samples[i].current_max >= curve.samples[i - 1].current_max - 1e-12);
    CHECK(curve.samples[i].residual < 2e-3);
  }
}

TEST_CASE("boundary rejects ratios outside [0, 1]") {
  const std::vector<double> bad{0.5, 1.5};
  CHECK(error_kind_of([&] { half::pinned_boundary(bad); }) == ErrorKind::validation_error);
}

TEST_CASE("discriminant scan that never leaves the three-root region") {
  half::BoundaryOptions opts;
  opts.scan_end = 0.6;
  CHECK(error_kind_of([&] { half::boundary_by_discriminant(0.5, opts); }) ==
        ErrorKind::root_branch_lost);
}
