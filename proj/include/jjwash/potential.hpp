#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jjwash/cell.hpp"
#include "jjwash/transform.hpp"

namespace jjwash {

enum class NoiseModel {
  derived,  // Omega^2 * D N N^T D^T from the cell's noise incidence
  isotropic  // Omega^2 * I, fluctuation-dissipation consistent override
};

/// Deterministic tilted washboard U(x) = -sum_k cos Phi_k(x) - tilt . x in
/// transformed variables, in units of E_J with currents in units of I_c.
/// Stochastic forcing is not part of U; its covariance is carried alongside
/// for the integrators.
class TiltedPotential {
 public:
  TiltedPotential(AffineMap phase_map, Eigen::VectorXd drive_x_dir,
                  Eigen::VectorXd drive_y_dir, Eigen::MatrixXd noise_shape,
                  double current_x, double current_y, double omega_noise);

  std::size_t dim() const { return static_cast<std::size_t>(coupling_.rows()); }
  std::size_t n_phases() const { return static_cast<std::size_t>(coupling_.cols()); }

  double energy(const Eigen::VectorXd& x) const;
  double periodic_part(const Eigen::VectorXd& x) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x) const;

  /// Allocation-free gradient for the integrators; no dimension checks.
  void gradient_into(const double* x, double* out) const;

  const AffineMap& phase_map() const { return phase_map_; }
  /// Row i, column k: dPhi_k/dx_i.
  const Eigen::MatrixXd& coupling() const { return coupling_; }
  const Eigen::VectorXd& tilt() const { return tilt_; }
  /// Per-axis smallest period of U_0 (NaN when an axis is not periodic).
  const Eigen::VectorXd& period() const { return period_; }
  const Eigen::MatrixXd& noise_cov() const { return noise_cov_; }
  double current_x() const { return current_x_; }
  double current_y() const { return current_y_; }
  double omega_noise() const { return omega_noise_; }

  /// Same landscape with different currents and noise intensity.
  TiltedPotential with_drive(double current_x, double current_y,
                             double omega_noise) const;

 private:
  void check_dim(const Eigen::VectorXd& x) const;

  AffineMap phase_map_;
  Eigen::MatrixXd coupling_;
  Eigen::VectorXd drive_x_dir_;
  Eigen::VectorXd drive_y_dir_;
  Eigen::MatrixXd noise_shape_;
  double current_x_;
  double current_y_;
  double omega_noise_;
  Eigen::VectorXd tilt_;
  Eigen::VectorXd period_;
  Eigen::MatrixXd noise_cov_;
};

TiltedPotential build_potential(const FrustrationCell& cell,
                                const TransformMatrix& t, double current_x,
                                double current_y, double omega_noise,
                                NoiseModel noise = NoiseModel::derived);

/// Smallest s > 0 along each axis with s * dPhi_k/dx_i in 2*pi*Z for every k
/// (multiples up to `max_multiple` are searched).
Eigen::VectorXd lattice_period(const Eigen::MatrixXd& coupling,
                               int max_multiple = 64);

struct TiltDecomposition {
  Eigen::VectorXd tilt;
  Eigen::VectorXd period;
};

TiltDecomposition tilt_decompose(const TiltedPotential& p);

// ---------------------------------------------------------------------------
// Slices

struct SliceSpec {
  std::map<std::size_t, double> fixed;
  std::array<std::size_t, 2> free{0, 1};
  std::array<double, 2> lower{0.0, 0.0};
  std::array<double, 2> upper{1.0, 1.0};
  std::array<std::size_t, 2> resolution{101, 101};
};

struct SliceGrid {
  SliceSpec spec;
  std::vector<double> axis0;
  std::vector<double> axis1;
  std::vector<double> values;  // row-major, values[i * axis1.size() + j]

  double at(std::size_t i, std::size_t j) const { return values[i * axis1.size() + j]; }
  Eigen::VectorXd point(std::size_t i, std::size_t j, std::size_t dim) const;
};

/// Every non-free axis must be fixed. Throws bad_slice_spec.
SliceGrid slice_grid(const TiltedPotential& p, const SliceSpec& spec);

/// Default window: one period per free axis centred at the origin.
SliceSpec default_slice(const TiltedPotential& p, std::map<std::size_t, double> fixed,
                        std::size_t resolution = 101);

std::string axis_name(std::size_t index, std::size_t dim);

}  // namespace jjwash
