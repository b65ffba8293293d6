#pragma once

#include <Eigen/Dense>

#include "jjwash/potential.hpp"

namespace jjwash {

struct ReducedCoordinates {
  double xi = 0.0;   // (alpha + gamma) / sqrt(2)
  double eta = 0.0;  // (alpha - gamma) / 2
};

/// Two-variable potential of the f=1/2 cell restricted to the plane y = 0
/// (beta = kappa):
///
///   U(xi, eta) = -cos(xi/sqrt2) cos(eta) - sin(xi/sqrt2) + (I/2) eta,
///
/// with U_full(x, 0, z) = 2 U(xi, eta). The restriction is only dynamically
/// meaningful below the critical current: above it the plane y = 0 is not
/// attracting for the full flow, so trajectories of the reduced system do not
/// shadow the array. It stays evaluable for any current.
class ReducedPotential {
 public:
  explicit ReducedPotential(double current) : current_(current) {}

  double energy(double xi, double eta) const;
  Eigen::Vector2d gradient(double xi, double eta) const;
  double current() const { return current_; }

  /// (x, z) in the full transformed variables at y = 0.
  static ReducedCoordinates from_full(double x, double z);
  static ReducedCoordinates from_phases(double alpha, double gamma);

 private:
  double current_;
};

ReducedPotential reduced_potential_y0(double current_x);

/// U_full(x, 0, z) - 2 U(xi(x,z), eta(x,z)); `full` must be the f=1/2
/// potential at the same current and zero transverse current.
double embedding_residual(const TiltedPotential& full, const ReducedPotential& reduced,
                          double x, double z);

}  // namespace jjwash
