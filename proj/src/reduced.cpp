#include "jjwash/reduced.hpp"

#include <cmath>
#include <numbers>

namespace jjwash {

namespace {
const double sqrt2 = std::sqrt(2.0);
}

double ReducedPotential::energy(double xi, double eta) const {
  const double s = xi / sqrt2;
  return -std::cos(s) * std::cos(eta) - std::sin(s) + 0.5 * current_ * eta;
}

Eigen::Vector2d ReducedPotential::gradient(double xi, double eta) const {
  const double s = xi / sqrt2;
  return {(std::sin(s) * std::cos(eta) - std::cos(s)) / sqrt2,
          std::cos(s) * std::sin(eta) + 0.5 * current_};
}

ReducedCoordinates ReducedPotential::from_phases(double alpha, double gamma) {
  return {(alpha + gamma) / sqrt2, (alpha - gamma) / 2.0};
}

ReducedCoordinates ReducedPotential::from_full(double x, double z) {
  // alpha = (pi - sqrt2 x + z)/2, gamma = (pi + sqrt2 x + z)/2
  const double alpha = 0.5 * (std::numbers::pi - sqrt2 * x + z);
  const double gamma = 0.5 * (std::numbers::pi + sqrt2 * x + z);
  return from_phases(alpha, gamma);
}

ReducedPotential reduced_potential_y0(double current_x) {
  return ReducedPotential(current_x);
}

double embedding_residual(const TiltedPotential& full, const ReducedPotential& reduced,
                          double x, double z) {
  const auto c = ReducedPotential::from_full(x, z);
  return full.energy(Eigen::Vector3d(x, 0.0, z)) - 2.0 * reduced.energy(c.xi, c.eta);
}

}  // namespace jjwash
