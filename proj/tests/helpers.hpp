#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "jjwash/error.hpp"

namespace testing {

inline Eigen::VectorXd random_point(std::mt19937_64& rng, Eigen::Index n, double scale = 6.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = u(rng);
  return x;
}

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

template <class F>
jjwash::ErrorKind error_kind_of(F&& f) {
  try {
    f();
  } catch (const jjwash::Error& e) {
    return e.kind();
  }
  throw std::runtime_error("expected a jjwash::Error");
}

}  // namespace testing
