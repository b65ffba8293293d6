#include "jjwash/potential.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "jjwash/error.hpp"

namespace jjwash {

using Eigen::MatrixXd;
using Eigen::VectorXd;

TiltedPotential::TiltedPotential(AffineMap phase_map, VectorXd drive_x_dir,
                                 VectorXd drive_y_dir, MatrixXd noise_shape,
                                 double current_x, double current_y,
                                 double omega_noise)
    : phase_map_(std::move(phase_map)),
      coupling_(phase_map_.linear.transpose()),
      drive_x_dir_(std::move(drive_x_dir)),
      drive_y_dir_(std::move(drive_y_dir)),
      noise_shape_(std::move(noise_shape)),
      current_x_(current_x),
      current_y_(current_y),
      omega_noise_(omega_noise),
      tilt_(current_x * drive_x_dir_ + current_y * drive_y_dir_),
      period_(lattice_period(coupling_)),
      noise_cov_(omega_noise * omega_noise * noise_shape_) {}

void TiltedPotential::check_dim(const VectorXd& x) const {
  if (static_cast<std::size_t>(x.size()) != dim()) {
    throw Error(ErrorKind::dimension_mismatch,
                "point has " + std::to_string(x.size()) + " components, potential has " +
                    std::to_string(dim()));
  }
}

double TiltedPotential::periodic_part(const VectorXd& x) const {
  check_dim(x);
  return -phase_map_(x).array().cos().sum();
}

double TiltedPotential::energy(const VectorXd& x) const {
  return periodic_part(x) - tilt_.dot(x);
}

VectorXd TiltedPotential::gradient(const VectorXd& x) const {
  check_dim(x);
  VectorXd g(x.size());
  gradient_into(x.data(), g.data());
  return g;
}

void TiltedPotential::gradient_into(const double* x, double* out) const {
  const Eigen::Index n = coupling_.rows();
  const Eigen::Index m = coupling_.cols();
  for (Eigen::Index i = 0; i < n; ++i) out[i] = -tilt_(i);
  for (Eigen::Index k = 0; k < m; ++k) {
    double phase = phase_map_.offsets(k);
    for (Eigen::Index i = 0; i < n; ++i) phase += coupling_(i, k) * x[i];
    const double s = std::sin(phase);
    for (Eigen::Index i = 0; i < n; ++i) out[i] += coupling_(i, k) * s;
  }
}

MatrixXd TiltedPotential::hessian(const VectorXd& x) const {
  check_dim(x);
  const VectorXd cosines = phase_map_(x).array().cos();
  MatrixXd h = coupling_ * cosines.asDiagonal() * coupling_.transpose();
  // A diag(c) A^T is symmetric in exact arithmetic; make it so bitwise.
  return 0.5 * (h + h.transpose()).eval();
}

TiltedPotential TiltedPotential::with_drive(double current_x, double current_y,
                                            double omega_noise) const {
  return TiltedPotential(phase_map_, drive_x_dir_, drive_y_dir_, noise_shape_,
                         current_x, current_y, omega_noise);
}

TiltedPotential build_potential(const FrustrationCell& cell,
                                const TransformMatrix& t, double current_x,
                                double current_y, double omega_noise,
                                NoiseModel noise) {
  const auto n = static_cast<Eigen::Index>(cell.n_vars);
  // Injected currents enter equation j with -I/(2 I_c); after x = D y the
  // tilt is (I/2) times the corresponding column of D.
  VectorXd dir_x = 0.5 * t.D.col(static_cast<Eigen::Index>(cell.drive_x));
  VectorXd dir_y = cell.drive_y
                       ? VectorXd(0.5 * t.D.col(static_cast<Eigen::Index>(*cell.drive_y)))
                       : VectorXd::Zero(n);
  MatrixXd shape;
  if (noise == NoiseModel::isotropic) {
    shape = MatrixXd::Identity(n, n);
  } else {
    const MatrixXd mixed = t.D * cell.noise_incidence;
    shape = mixed * mixed.transpose();
  }
  return TiltedPotential(phase_map_x(cell, t), std::move(dir_x), std::move(dir_y),
                         std::move(shape), current_x, current_y, omega_noise);
}

VectorXd lattice_period(const MatrixXd& coupling, int max_multiple) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  VectorXd period(coupling.rows());
  for (Eigen::Index i = 0; i < coupling.rows(); ++i) {
    double largest_base = 0.0;
    for (Eigen::Index k = 0; k < coupling.cols(); ++k) {
      const double c = std::abs(coupling(i, k));
      if (c > 1e-14) largest_base = std::max(largest_base, two_pi / c);
    }
    period(i) = std::numeric_limits<double>::quiet_NaN();
    if (largest_base == 0.0) continue;
    // The period is a common multiple of every per-phase base period, hence a
    // multiple of the largest one.
    for (int j = 1; j <= max_multiple; ++j) {
      const double s = j * largest_base;
      bool all_integer = true;
      for (Eigen::Index k = 0; k < coupling.cols() && all_integer; ++k) {
        const double turns = s * coupling(i, k) / two_pi;
        all_integer = std::abs(turns - std::round(turns)) < 1e-9;
      }
      if (all_integer) {
        period(i) = s;
        break;
      }
    }
  }
  return period;
}

TiltDecomposition tilt_decompose(const TiltedPotential& p) {
  return {p.tilt(), p.period()};
}

// ---------------------------------------------------------------------------

std::string axis_name(std::size_t index, std::size_t dim) {
  static const char* short_names[] = {"x", "y", "z"};
  if (dim <= 3) return short_names[index];
  return "x" + std::to_string(index + 1);
}

VectorXd SliceGrid::point(std::size_t i, std::size_t j, std::size_t dim) const {
  VectorXd x = VectorXd::Zero(static_cast<Eigen::Index>(dim));
  for (const auto& [index, value] : spec.fixed) x(static_cast<Eigen::Index>(index)) = value;
  x(static_cast<Eigen::Index>(spec.free[0])) = axis0[i];
  x(static_cast<Eigen::Index>(spec.free[1])) = axis1[j];
  return x;
}

namespace {

std::vector<double> axis_values(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

}  // namespace

SliceGrid slice_grid(const TiltedPotential& p, const SliceSpec& spec) {
  const std::size_t dim = p.dim();
  auto bad = [](const std::string& what) {
    throw Error(ErrorKind::bad_slice_spec, what);
  };
  if (spec.free[0] >= dim || spec.free[1] >= dim) bad("free axis out of range");
  if (spec.free[0] == spec.free[1]) bad("the two free axes must differ");
  for (std::size_t a = 0; a < 2; ++a) {
    if (spec.resolution[a] < 2) bad("resolution must be at least 2");
    if (!(spec.upper[a] > spec.lower[a])) bad("empty range on a free axis");
  }
  for (std::size_t i = 0; i < dim; ++i) {
    const bool is_free = i == spec.free[0] || i == spec.free[1];
    const bool is_fixed = spec.fixed.contains(i);
    if (is_free && is_fixed) bad("axis " + axis_name(i, dim) + " is both fixed and free");
    if (!is_free && !is_fixed) bad("axis " + axis_name(i, dim) + " is neither fixed nor free");
  }
  for (const auto& [index, value] : spec.fixed) {
    if (index >= dim) bad("fixed axis out of range");
  }

  SliceGrid grid;
  grid.spec = spec;
  grid.axis0 = axis_values(spec.lower[0], spec.upper[0], spec.resolution[0]);
  grid.axis1 = axis_values(spec.lower[1], spec.upper[1], spec.resolution[1]);
  grid.values.resize(grid.axis0.size() * grid.axis1.size());
  for (std::size_t i = 0; i < grid.axis0.size(); ++i) {
    for (std::size_t j = 0; j < grid.axis1.size(); ++j) {
      grid.values[i * grid.axis1.size() + j] = p.energy(grid.point(i, j, dim));
    }
  }
  return grid;
}

SliceSpec default_slice(const TiltedPotential& p, std::map<std::size_t, double> fixed,
                        std::size_t resolution) {
  SliceSpec spec;
  std::size_t a = 0;
  for (std::size_t i = 0; i < p.dim() && a < 2; ++i) {
    if (!fixed.contains(i)) spec.free[a++] = i;
  }
  for (std::size_t k = 0; k < 2; ++k) {
    const double period = p.period()(static_cast<Eigen::Index>(spec.free[k]));
    const double half = std::isfinite(period) ? period / 2 : std::numbers::pi;
    spec.lower[k] = -half;
    spec.upper[k] = half;
    spec.resolution[k] = resolution;
  }
  spec.fixed = std::move(fixed);
  return spec;
}

}  // namespace jjwash
