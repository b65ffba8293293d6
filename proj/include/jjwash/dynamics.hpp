#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "jjwash/potential.hpp"

namespace jjwash {

enum class Scheme {
  underdamped,  // beta_c x'' + x' + grad U = noise, stochastic Heun
  overdamped,   // x' = -grad U + noise, Euler-Maruyama
  hamiltonian,  // beta_c x'' = -grad U, velocity Verlet
};

std::string_view to_string(Scheme s);
Scheme parse_scheme(std::string_view name);

/// Integrator settings. The currents and the noise intensity belong to the
/// potential; its noise_cov is the covariance rate of the forcing.
struct SimulationConfig {
  Scheme scheme = Scheme::underdamped;
  double beta_c = 1.0;  // ignored for overdamped
  double dt = 1e-3;     // in units of tau
  std::uint64_t n_steps = 1000;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // independent stream per trajectory
  std::uint64_t record_stride = 1;
  int max_retries = 3;       // dt halvings on blow-up
  double blowup_threshold = 1e8;
  bool drop_drift = false;   // diagnostic: integrate the noise alone
};

struct State {
  Eigen::VectorXd x;
  Eigen::VectorXd v;  // empty means zero velocity
};

struct Trajectory {
  Scheme scheme = Scheme::underdamped;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> positions;
  std::vector<Eigen::VectorXd> velocities;  // empty for overdamped runs
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  double dt = 0.0;  // step actually used after any halving
  std::uint64_t n_steps = 0;
  int retries = 0;

  bool has_velocities() const { return !velocities.empty(); }
};

/// Throws invalid_config for inconsistent settings.
void validate(const SimulationConfig& cfg, const TiltedPotential& p);

/// Throws invalid_config, dimension_mismatch or numerical_blowup (after
/// max_retries halvings of dt).
Trajectory simulate(const TiltedPotential& p, const SimulationConfig& cfg,
                    const State& init);

/// L with L L^T = cov; the element-wise square root for diagonal input,
/// otherwise the symmetric square root. Throws not_psd.
Eigen::MatrixXd noise_factor(const Eigen::MatrixXd& cov);

/// Time-averaged phase velocity over the trailing `window` fraction of the
/// recorded time span. Throws empty_trajectory.
Eigen::VectorXd mean_voltage(const Trajectory& traj, double window = 0.5);

/// H = sum_i beta_c v_i^2 / 2 + U(x) per recorded frame. Throws
/// missing_velocities for overdamped trajectories.
std::vector<double> energy_series(const Trajectory& traj, const TiltedPotential& p,
                                  double beta_c);

}  // namespace jjwash
