#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace jjwash {

/// Affine constraint sum_k weights_k * phase_k == constant, required to hold
/// for every value of the independent variables.
struct FluxIdentity {
  Eigen::VectorXd weights;
  double constant = 0.0;
};

/// Unit-cell definition of a frustrated array. Pure data: the incidence of
/// junction phases in the current equations (omega), the derivatives of the
/// phases with respect to the independent variables (phi_dy, row j holds
/// dPhi_k/dy_j), affine offsets, drive and noise incidence.
///
/// noise_incidence is expressed in the y-equations: column l is one
/// independent junction noise, entry (j, l) its coefficient in equation j.
struct FrustrationCell {
  std::string name;
  int f_num = 0;
  int f_den = 1;
  std::size_t n_vars = 0;
  std::size_t n_phases = 0;
  Eigen::MatrixXd omega;            // n_vars x n_phases
  Eigen::MatrixXd phi_dy;           // n_vars x n_phases
  Eigen::VectorXd phase_offsets;    // n_phases, radians
  std::vector<FluxIdentity> flux_identities;
  std::size_t drive_x = 0;
  std::optional<std::size_t> drive_y;
  Eigen::MatrixXd noise_incidence;  // n_vars x n_noise
  std::optional<Eigen::MatrixXd> canonical_D;
  std::vector<std::string> labels;

  /// True for the lattice cells (f = M/N); false for the single junction.
  bool is_lattice() const { return f_num > 0; }
};

/// Built-in catalog: "1/2", "1/3" and "single_junction".
/// Throws Error(unsupported_frustration) for anything else.
FrustrationCell builtin_cell(std::string_view key);
FrustrationCell builtin_cell(int f_num, int f_den);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ValidationReport {
  std::vector<CheckResult> checks;

  bool ok() const;
  const CheckResult* find(std::string_view name) const;
};

/// Structural checks on a cell. Never throws; failures are recorded.
/// Flux identities are evaluated at `n_points` pseudo-random y drawn from
/// `seed`.
ValidationReport validate_cell(const FrustrationCell& cell,
                               std::uint64_t seed = 20240601,
                               int n_points = 100);

/// v -> offsets + linear * v. For phase maps, linear(k, i) = dPhi_k/dv_i.
struct AffineMap {
  Eigen::MatrixXd linear;
  Eigen::VectorXd offsets;

  Eigen::VectorXd operator()(const Eigen::VectorXd& v) const;
  std::size_t input_dim() const { return static_cast<std::size_t>(linear.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(linear.rows()); }
};

AffineMap phase_map_y(const FrustrationCell& cell);

/// Plain-text cell schema (see README). Round-trips builtin cells.
FrustrationCell parse_cell(std::string_view text);
FrustrationCell load_cell(const std::string& path);
std::string serialize_cell(const FrustrationCell& cell);

}  // namespace jjwash
