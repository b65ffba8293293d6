#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "jjwash/cell.hpp"
#include "jjwash/transform.hpp"

using namespace jjwash;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using testing::error_kind_of;
using testing::max_abs;

namespace {

constexpr double pi = std::numbers::pi;
const double s2 = std::sqrt(2.0);
const double s3 = std::sqrt(3.0);

MatrixXd paper_D_third() {
  MatrixXd D(4, 4);
  D << 2 / s3, 0, 0, 0, 0, 2 / s3, 0, 0, 0, 0, 1, 1, 0, 0, 1 / s3, -1 / s3;
  return D;
}

// Independent oracle: S from the definition with plain inverses.
MatrixXd target_oracle(const FrustrationCell& c) {
  return c.phi_dy * c.omega.transpose() * (c.omega * c.omega.transpose()).inverse();
}

}  // namespace

TEST_CASE("target matrices") {
  const TargetMatrix half = compute_target(builtin_cell("1/2"));
  CHECK(max_abs(half.S - Eigen::Vector3d(1, 1, 0.5).asDiagonal().toDenseMatrix()) < 1e-15);

  const FrustrationCell third = builtin_cell("1/3");
  const TargetMatrix t = compute_target(third);
  MatrixXd expected(4, 4);
  expected << 2.0 / 3, 0, 0, 0, 0, 2.0 / 3, 0, 0, 0, 0, 2.0 / 3, 1.0 / 3, 0, 0, 1.0 / 3, 2.0 / 3;
  CHECK(max_abs(t.S - expected) < 1e-14);
  CHECK(max_abs(t.S - target_oracle(third)) < 1e-14);
  const MatrixXd D = paper_D_third();
  CHECK(max_abs(D.transpose() * D / 2 - expected) < 1e-15);
}

TEST_CASE("singular incidence") {
  FrustrationCell c = builtin_cell("1/2");
  c.omega.row(2) = c.omega.row(0);
  CHECK(error_kind_of([&] { compute_target(c); }) == ErrorKind::singular_incidence);
}

TEST_CASE("canonical factorizations") {
  const TransformMatrix half = derive_transform(builtin_cell("1/2"));
  CHECK(max_abs(half.D - Eigen::Vector3d(s2, s2, 1).asDiagonal().toDenseMatrix()) < 1e-15);

  const TransformMatrix third = derive_transform(builtin_cell("1/3"));
  CHECK(max_abs(third.D - paper_D_third()) < 1e-15);

  for (const TransformMatrix* t : {&half, &third}) {
    const auto n = t->D.rows();
    CHECK(max_abs(t->D * t->D_inv - MatrixXd::Identity(n, n)) < 1e-12);
  }
}

TEST_CASE("triangular factor without a canonical D") {
  const FrustrationCell c = builtin_cell("1/2");
  const TransformMatrix t = factor_transform(compute_target(c), std::nullopt);
  CHECK(max_abs(t.D - Eigen::Vector3d(s2, s2, 1).asDiagonal().toDenseMatrix()) < 1e-15);

  const FrustrationCell third = builtin_cell("1/3");
  const TargetMatrix S = compute_target(third);
  const TransformMatrix tri = factor_transform(S, std::nullopt);
  CHECK(max_abs(tri.D.transpose() * tri.D - 2 * S.S) < 1e-12);
  CHECK(max_abs(MatrixXd(tri.D.triangularView<Eigen::StrictlyLower>())) == 0.0);
  CHECK(verify_exactness(third, tri).passed());
}

TEST_CASE("canonical D is checked against the target") {
  const FrustrationCell c = builtin_cell("1/2");
  const MatrixXd wrong = MatrixXd::Identity(3, 3);
  CHECK(error_kind_of([&] { factor_transform(compute_target(c), wrong); }) ==
        ErrorKind::canonical_mismatch);
}

TEST_CASE("indefinite target") {
  TargetMatrix bad{Eigen::Vector3d(1, -1, 1).asDiagonal().toDenseMatrix()};
  CHECK(error_kind_of([&] { factor_transform(bad, std::nullopt); }) ==
        ErrorKind::not_positive_definite);
}

TEST_CASE("phase_map_x at listed points") {
  const FrustrationCell half = builtin_cell("1/2");
  const AffineMap m = phase_map_x(half, derive_transform(half));
  CHECK(max_abs(m(Eigen::Vector3d(0, 0, -pi / 2)) - Eigen::Vector4d::Constant(pi / 4)) < 1e-15);
  CHECK(max_abs(m(Eigen::Vector3d::Zero()) - Eigen::Vector4d(pi / 2, 0, pi / 2, 0)) == 0.0);

  // alpha = (pi - sqrt2 x + z)/2, gamma = (pi + sqrt2 x + z)/2.
  const Eigen::Vector3d x(0.3, -0.7, 1.1);
  const VectorXd phi = m(x);
  CHECK(phi(0) == doctest::Approx((pi - s2 * x(0) + x(2)) / 2).epsilon(1e-14));
  CHECK(phi(2) == doctest::Approx((pi + s2 * x(0) + x(2)) / 2).epsilon(1e-14));

  const FrustrationCell third = builtin_cell("1/3");
  const AffineMap m3 = phase_map_x(third, derive_transform(third));
  VectorXd expected(6);
  expected << pi / 3, pi / 3, pi / 3, pi / 3, 0, 0;
  CHECK(max_abs(m3(VectorXd::Zero(4)) - expected) < 1e-15);
}

TEST_CASE("exactness with canonical D") {
  const FrustrationCell half = builtin_cell("1/2");
  const ExactnessReport r = verify_exactness(half, derive_transform(half));
  CHECK(r.coefficient_mismatch < 1e-15);  // one rounding of 1/sqrt2
  CHECK(r.x_asymmetry < 1e-14);
  CHECK(r.y_asymmetry > 0.1);
  CHECK(r.passed());

  const FrustrationCell third = builtin_cell("1/3");
  const ExactnessReport r3 = verify_exactness(third, derive_transform(third));
  CHECK(r3.coefficient_mismatch < 1e-12);
  CHECK(r3.x_asymmetry < 1e-10);
  CHECK(r3.passed());
}

TEST_CASE("identity D is not exact") {
  const FrustrationCell half = builtin_cell("1/2");
  const ExactnessReport r = verify_exactness(half, make_transform(MatrixXd::Identity(3, 3)));
  CHECK_FALSE(r.passed());
  CHECK(r.x_asymmetry > 0.1);
}

TEST_CASE("orthogonal freedom keeps exactness") {
  std::mt19937_64 rng(11);
  for (const char* key : {"1/2", "1/3"}) {
    CAPTURE(key);
    const FrustrationCell c = builtin_cell(key);
    const TransformMatrix t = derive_transform(c);
    const auto n = t.D.rows();
    const MatrixXd Q = Eigen::HouseholderQR<MatrixXd>(testing::random_point(rng, n * n)
                                                          .reshaped(n, n))
                           .householderQ();
    const TransformMatrix qd = make_transform(Q * t.D);
    CHECK(max_abs(qd.D.transpose() * qd.D - 2 * compute_target(c).S) < 1e-12);
    const ExactnessReport r = verify_exactness(c, qd);
    CHECK(r.passed());
    // Different variables, different phase map.
    CHECK(max_abs(phase_map_x(c, qd).linear - phase_map_x(c, t).linear) > 1e-3);
  }
}

TEST_CASE("drift Jacobian in x is symmetric at random points and currents") {
  std::mt19937_64 rng(5);
  for (const char* key : {"1/2", "1/3"}) {
    const FrustrationCell c = builtin_cell(key);
    const TransformMatrix t = derive_transform(c);
    for (int i = 0; i < 20; ++i) {
      const MatrixXd J = drift_jacobian_x(c, t, testing::random_point(rng, t.D.rows()));
      CHECK(max_abs(J - J.transpose()) < 1e-10);
    }
  }
}
