#pragma once

#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jjwash/potential.hpp"

namespace jjwash {

enum class Stability { minimum, saddle, maximum, degenerate };

std::string_view to_string(Stability s);

struct FixedPoint {
  Eigen::VectorXd x;
  Stability classification = Stability::degenerate;
  Eigen::VectorXd eigenvalues;  // ascending
  double residual = 0.0;        // max |dU/dx_i|
  int iterations = 0;
};

enum class FixedPointTarget {
  /// Modified Newton with Armijo descent on U. Only minima (or degenerate
  /// points at the edge of a well) are returned.
  minimum,
  /// Newton on |grad U|^2 / 2; converges to saddles and maxima as well.
  any_stationary,
};

struct NewtonOptions {
  FixedPointTarget target = FixedPointTarget::minimum;
  int max_iter = 200;
  double tolerance = 1e-10;      // on max |dU/dx_i|
  double armijo = 1e-4;
  double backtrack = 0.5;
  double min_step = 1e-8;
  double max_step_norm = 1.0;    // caps jumps between wells
  double degenerate_eigenvalue = 1e-6;
};

Stability classify(const Eigen::VectorXd& eigenvalues, double degenerate_tol = 1e-6);

/// Throws Error(no_convergence) when no fixed point of the requested kind is
/// reached from `seed` (including the running regime, where none exists).
FixedPoint find_fixed_point(const TiltedPotential& p, const Eigen::VectorXd& seed,
                            const NewtonOptions& options = {});

/// Seeds on a uniform `per_axis`^n grid spanning one period per axis; returns
/// every converged point, dropping duplicates within `merge_tol`. Points are
/// not reduced modulo the period.
std::vector<FixedPoint> sweep_fixed_points(const TiltedPotential& p, int per_axis,
                                           const NewtonOptions& options = {},
                                           double merge_tol = 1e-6);

}  // namespace jjwash
