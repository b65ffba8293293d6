#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "helpers.hpp"
#include "jjwash/cell.hpp"
#include "jjwash/half_cell.hpp"
#include "jjwash/potential.hpp"
#include "jjwash/reduced.hpp"
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

TiltedPotential make(const char* key, double ix, double iy, double omega = 0.0,
                     NoiseModel noise = NoiseModel::derived) {
  const FrustrationCell c = builtin_cell(key);
  return build_potential(c, derive_transform(c), ix, iy, omega, noise);
}

// f=1/3 written out from its six phases in x, independent of the library's
// coupling matrix.
double third_oracle(const VectorXd& x, double ix, double iy) {
  const double x1 = x(0), x2 = x(1), x3 = x(2), x4 = x(3);
  const double phases[6] = {
      (-s3 * x1 - s3 * x4 + pi) / 3,
      (s3 * x2 + s3 * x4 + pi) / 3,
      (-s3 * x2 - 1.5 * x3 + s3 / 2 * x4 + pi) / 3,
      (1.5 * x3 - s3 / 2 * x4 + s3 * x1 + pi) / 3,
      (s3 * x2 - 1.5 * x3 - s3 / 2 * x4) / 3,
      (1.5 * x3 + s3 / 2 * x4 - s3 * x1) / 3,
  };
  double u = 0.0;
  for (double phi : phases) u -= std::cos(phi);
  return u - (ix * x1 + iy * x2) / s3;
}

}  // namespace

TEST_CASE("period vectors") {
  const TiltedPotential half = make("1/2", 0, 0);
  CHECK(max_abs(half.period() - 4 * pi * Eigen::Vector3d(1 / s2, 1 / s2, 1)) < 1e-12);
  // The x3 period is 4 pi: the x3 coefficients of the phases are +-1/2.
  const TiltedPotential third = make("1/3", 0, 0);
  CHECK(max_abs(third.period() - 2 * pi / s3 * Eigen::Vector4d(3, 3, 2 * s3, 6)) < 1e-12);
}

TEST_CASE("noise covariance") {
  CHECK(max_abs(make("1/2", 0, 0, 0.3).noise_cov() - 0.09 * MatrixXd::Identity(3, 3)) < 1e-15);
  CHECK(max_abs(make("1/3", 0, 0, 0.3).noise_cov() -
                0.09 * Eigen::Vector4d(1, 1, 2, 2.0 / 3).asDiagonal().toDenseMatrix()) < 1e-15);
  CHECK(max_abs(make("1/3", 0, 0, 0.3, NoiseModel::isotropic).noise_cov() -
                0.09 * MatrixXd::Identity(4, 4)) < 1e-15);
  const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(make("1/3", 0.2, 0.1, 1.0).noise_cov());
  CHECK(eig.eigenvalues().minCoeff() >= 0.0);
}

TEST_CASE("f=1/2 energies") {
  const TiltedPotential p = make("1/2", 0, 0);
  CHECK(p.energy(Eigen::Vector3d::Zero()) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(p.energy(Eigen::Vector3d(0, 0, -pi / 2)) == doctest::Approx(-2 * s2).epsilon(1e-15));
  const TiltedPotential q = make("1/2", 0.5, 0);
  CHECK(q.energy(Eigen::Vector3d(2 * pi * s2, 0, 0)) ==
        doctest::Approx(-2 - 2 * pi * 0.5).epsilon(1e-14));
}

TEST_CASE("f=1/2 closed-form gradient") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 50; ++i) {
    const double ix = testing::random_point(rng, 1, 1.0)(0);
    const double iy = testing::random_point(rng, 1, 1.0)(0);
    const Eigen::Vector3d x = testing::random_point(rng, 3);
    const VectorXd g = half::potential(ix, iy).gradient(x);
    CHECK(max_abs(g - half::stationary_residuals(x, ix, iy)) < 1e-13);
  }
  CHECK(max_abs(make("1/2", 0, 0).gradient(Eigen::Vector3d(0, 0, -pi / 2))) < 1e-15);
}

TEST_CASE("f=1/3 against a hand-written oracle") {
  std::mt19937_64 rng(22);
  const TiltedPotential p = make("1/3", 0.3, -0.2);
  for (int i = 0; i < 50; ++i) {
    const VectorXd x = testing::random_point(rng, 4);
    CHECK(p.energy(x) == doctest::Approx(third_oracle(x, 0.3, -0.2)).epsilon(1e-12));
  }
  CHECK(max_abs(make("1/3", 0, 0).gradient(VectorXd::Zero(4))) < 1e-15);
}

TEST_CASE("tilt vectors") {
  const TiltDecomposition h = tilt_decompose(make("1/2", 0.4, 0.2));
  CHECK(max_abs(h.tilt - Eigen::Vector3d(0.4 / s2, 0.2 / s2, 0)) < 1e-15);
  const TiltDecomposition t = tilt_decompose(make("1/3", 0.4, 0.2));
  CHECK(max_abs(t.tilt - Eigen::Vector4d(0.4 / s3, 0.2 / s3, 0, 0)) < 1e-15);
  const TiltedPotential z = make("1/2", 0, 0);
  CHECK(max_abs(z.tilt()) == 0.0);
  const Eigen::Vector3d x(0.1, 0.2, 0.3);
  CHECK(z.energy(x) == z.periodic_part(x));
}

TEST_CASE("periodicity and tilt identity") {
  std::mt19937_64 rng(23);
  for (const char* key : {"1/2", "1/3"}) {
    CAPTURE(key);
    const TiltedPotential p = make(key, 0.37, -0.21);
    for (int i = 0; i < 100; ++i) {
      const VectorXd x = testing::random_point(rng, static_cast<Eigen::Index>(p.dim()));
      const VectorXd xa = x + p.period();
      CHECK(std::abs(p.periodic_part(xa) - p.periodic_part(x)) < 1e-10);
      CHECK(std::abs(p.energy(xa) - p.energy(x) + p.tilt().dot(p.period())) < 1e-10);
    }
  }
}

TEST_CASE("gradient and Hessian against finite differences") {
  std::mt19937_64 rng(24);
  for (const char* key : {"1/2", "1/3", "single_junction"}) {
    CAPTURE(key);
    const TiltedPotential p = make(key, 0.3, 0.1);
    const auto n = static_cast<Eigen::Index>(p.dim());
    for (int i = 0; i < 100; ++i) {
      const VectorXd x = testing::random_point(rng, n);
      const VectorXd g = p.gradient(x);
      const MatrixXd H = p.hessian(x);
      VectorXd fd(n);
      MatrixXd fdh(n, n);
      for (Eigen::Index k = 0; k < n; ++k) {
        VectorXd e = VectorXd::Zero(n);
        e(k) = 1e-5;
        fd(k) = (p.energy(x + e) - p.energy(x - e)) / 2e-5;
        e(k) = 1e-4;
        fdh.col(k) = (p.gradient(x + e) - p.gradient(x - e)) / 2e-4;
      }
      CHECK((fd - g).norm() / std::max(1.0, g.norm()) < 1e-6);
      CHECK(max_abs(fdh - H) < 1e-4);
      CHECK(max_abs(H - H.transpose()) == 0.0);
    }
  }
}

TEST_CASE("allocation-free gradient matches") {
  const TiltedPotential p = make("1/3", 0.2, 0.1);
  const Eigen::Vector4d x(0.3, -1.2, 2.0, 0.4);
  VectorXd out(4);
  p.gradient_into(x.data(), out.data());
  CHECK(max_abs(out - p.gradient(x)) == 0.0);
}

TEST_CASE("f=1/2 mirror symmetries at zero current") {
  std::mt19937_64 rng(25);
  const TiltedPotential p = make("1/2", 0, 0);
  for (int i = 0; i < 100; ++i) {
    const Eigen::Vector3d x = testing::random_point(rng, 3);
    CHECK(p.energy(Eigen::Vector3d(-x(0), x(1), x(2))) == doctest::Approx(p.energy(x)).epsilon(1e-13));
    CHECK(p.energy(Eigen::Vector3d(x(0), -x(1), x(2))) == doctest::Approx(p.energy(x)).epsilon(1e-13));
  }
}

TEST_CASE("Hessian definiteness at the ground state and critical point") {
  const MatrixXd H = make("1/2", 0, 0).hessian(Eigen::Vector3d(0, 0, -pi / 2));
  CHECK(Eigen::SelfAdjointEigenSolver<MatrixXd>(H).eigenvalues().minCoeff() > 0.0);

  const double xc = std::acos(2 * s2 - 3) / s2;
  const double zc = -2 * std::asin(std::sqrt((2 - s2) / 2));
  const double ic = std::sqrt(12 - 8 * s2);
  const MatrixXd Hc = make("1/2", ic, 0).hessian(Eigen::Vector3d(xc, 0, zc));
  CHECK(std::abs(Eigen::SelfAdjointEigenSolver<MatrixXd>(Hc).eigenvalues()(0)) < 1e-4);
}

TEST_CASE("reduced potential embedding") {
  std::mt19937_64 rng(26);
  for (double current : {0.0, 0.3, 0.9}) {
    const TiltedPotential full = half::potential(current, 0.0);
    const ReducedPotential reduced = reduced_potential_y0(current);
    for (int i = 0; i < 100; ++i) {
      const VectorXd v = testing::random_point(rng, 2);
      CHECK(std::abs(embedding_residual(full, reduced, v(0), v(1))) < 1e-12);
    }
  }
  // alpha = gamma = pi/4 is the ground state (0, 0, -pi/2).
  const ReducedCoordinates r = ReducedPotential::from_phases(pi / 4, pi / 4);
  CHECK(reduced_potential_y0(0).energy(r.xi, r.eta) == doctest::Approx(-s2).epsilon(1e-15));
  const ReducedCoordinates f = ReducedPotential::from_full(0, -pi / 2);
  CHECK(f.xi == doctest::Approx(r.xi));
  CHECK(std::abs(f.eta - r.eta) < 1e-15);
}

TEST_CASE("reduced gradient") {
  const ReducedPotential r(0.4);
  const double xi = 0.7, eta = -0.3, h = 1e-6;
  const Eigen::Vector2d g = r.gradient(xi, eta);
  CHECK(g(0) == doctest::Approx((r.energy(xi + h, eta) - r.energy(xi - h, eta)) / (2 * h)).epsilon(1e-8));
  CHECK(g(1) == doctest::Approx((r.energy(xi, eta + h) - r.energy(xi, eta - h)) / (2 * h)).epsilon(1e-8));
}

TEST_CASE("slices") {
  const TiltedPotential p = make("1/2", 0.292893, 0);
  SliceSpec s = default_slice(p, {{2, pi / 2}}, 21);
  const SliceGrid g = slice_grid(p, s);
  REQUIRE(g.values.size() == 21 * 21);
  for (std::size_t i = 0; i < 21; i += 5) {
    for (std::size_t j = 0; j < 21; j += 4) {
      CHECK(g.at(i, j) == p.energy(g.point(i, j, 3)));
    }
  }
  CHECK(g.axis0.front() == doctest::Approx(-pi * s2));
  CHECK(g.axis0.back() == doctest::Approx(pi * s2));

  SliceSpec clash = s;
  clash.fixed[0] = 1.0;
  CHECK(error_kind_of([&] { slice_grid(p, clash); }) == ErrorKind::bad_slice_spec);
  SliceSpec missing = s;
  missing.fixed.clear();
  CHECK(error_kind_of([&] { slice_grid(p, missing); }) == ErrorKind::bad_slice_spec);
  SliceSpec tiny = s;
  tiny.resolution = {1, 5};
  CHECK(error_kind_of([&] { slice_grid(p, tiny); }) == ErrorKind::bad_slice_spec);
}

TEST_CASE("dimension mismatch") {
  const TiltedPotential p = make("1/2", 0, 0);
  CHECK(error_kind_of([&] { p.energy(VectorXd::Zero(4)); }) == ErrorKind::dimension_mismatch);
}

TEST_CASE("axis names") {
  CHECK(axis_name(2, 3) == "z");
  CHECK(axis_name(3, 4) == "x4");
}
