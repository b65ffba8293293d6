#include "jjwash/cell.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include "jjwash/error.hpp"
#include "jjwash/text_format.hpp"

namespace jjwash {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double pi = std::numbers::pi;

MatrixXd rows_to_matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const auto n_rows = static_cast<Eigen::Index>(rows.size());
  const auto n_cols = static_cast<Eigen::Index>(rows.begin()->size());
  MatrixXd m(n_rows, n_cols);
  Eigen::Index i = 0;
  for (const auto& r : rows) {
    Eigen::Index j = 0;
    for (double v : r) m(i, j++) = v;
    ++i;
  }
  return m;
}

// Each equation j gets coefficient 1/2 on its own block of junction noises.
MatrixXd block_noise(const std::vector<int>& counts) {
  int total = 0;
  for (int c : counts) total += c;
  MatrixXd n = MatrixXd::Zero(static_cast<Eigen::Index>(counts.size()), total);
  int col = 0;
  for (std::size_t j = 0; j < counts.size(); ++j) {
    for (int l = 0; l < counts[j]; ++l) n(static_cast<Eigen::Index>(j), col++) = 0.5;
  }
  return n;
}

FrustrationCell half_cell() {
  FrustrationCell c;
  c.name = "f=1/2";
  c.f_num = 1;
  c.f_den = 2;
  c.n_vars = 3;
  c.n_phases = 4;
  c.omega = rows_to_matrix({{-1, 0, 1, 0}, {0, -1, 0, 1}, {1, -1, 1, -1}});
  c.phi_dy = rows_to_matrix(
      {{-1, 0, 1, 0}, {0, -1, 0, 1}, {0.5, -0.5, 0.5, -0.5}});
  c.phase_offsets = VectorXd{{pi / 2, 0.0, pi / 2, 0.0}};
  // Plaquette condition beta + kappa + alpha + gamma = pi.
  c.flux_identities.push_back({VectorXd{{1.0, 1.0, 1.0, 1.0}}, pi});
  c.drive_x = 0;
  c.drive_y = 1;
  c.noise_incidence = block_noise({2, 2, 4});
  const double r2 = std::sqrt(2.0);
  c.canonical_D = rows_to_matrix({{r2, 0, 0}, {0, r2, 0}, {0, 0, 1}});
  c.labels = {"alpha", "beta", "gamma", "kappa"};
  return c;
}

FrustrationCell third_cell() {
  FrustrationCell c;
  c.name = "f=1/3";
  c.f_num = 1;
  c.f_den = 3;
  c.n_vars = 4;
  c.n_phases = 6;
  c.omega = rows_to_matrix({{-1, 0, 0, 1, 0, -1},
                            {0, 1, -1, 0, 1, 0},
                            {-1, 1, 0, 0, -1, 1},
                            {1, -1, -1, 1, 0, 0}});
  c.phi_dy = rows_to_matrix({{-2, 0, 0, 2, 0, -2},
                             {0, 2, -2, 0, 2, 0},
                             {-1, 1, -1, 1, -2, 2},
                             {1, -1, -2, 2, -1, 1}}) /
             3.0;
  c.phase_offsets = VectorXd{{pi / 3, pi / 3, pi / 3, pi / 3, 0.0, 0.0}};
  // Phase order: alpha, beta, beta0, gamma, lambda, delta.
  c.flux_identities.push_back({VectorXd{{0, 0, 1, 1, 1, 1}}, 2 * pi / 3});
  c.flux_identities.push_back({VectorXd{{1, 1, 0, 0, -1, -1}}, 2 * pi / 3});
  c.drive_x = 0;
  c.drive_y = 1;
  c.noise_incidence = block_noise({3, 3, 4, 4});
  const double r3 = std::sqrt(3.0);
  c.canonical_D = rows_to_matrix({{2 / r3, 0, 0, 0},
                                  {0, 2 / r3, 0, 0},
                                  {0, 0, 1, 1},
                                  {0, 0, 1 / r3, -1 / r3}});
  c.labels = {"alpha", "beta", "beta0", "gamma", "lambda", "delta"};
  return c;
}

// One junction; y is the half phase so that x = 2y is the junction phase and
// U(x) = -cos x - I x.
FrustrationCell single_junction_cell() {
  FrustrationCell c;
  c.name = "single_junction";
  c.f_num = 0;
  c.f_den = 1;
  c.n_vars = 1;
  c.n_phases = 1;
  c.omega = MatrixXd::Constant(1, 1, 1.0);
  c.phi_dy = MatrixXd::Constant(1, 1, 2.0);
  c.phase_offsets = VectorXd::Zero(1);
  c.drive_x = 0;
  c.noise_incidence = MatrixXd::Constant(1, 1, 0.5);
  c.canonical_D = MatrixXd::Constant(1, 1, 2.0);
  c.labels = {"phi"};
  return c;
}

std::string shape(const MatrixXd& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

FrustrationCell builtin_cell(std::string_view key) {
  if (key == "1/2") return half_cell();
  if (key == "1/3") return third_cell();
  if (key == "single_junction" || key == "single") return single_junction_cell();
  throw Error(ErrorKind::unsupported_frustration,
              "frustration '" + std::string(key) +
                  "' is not in the catalog (available: 1/2, 1/3, single_junction)");
}

FrustrationCell builtin_cell(int f_num, int f_den) {
  if (f_num == 1 && f_den == 2) return half_cell();
  if (f_num == 1 && f_den == 3) return third_cell();
  throw Error(ErrorKind::unsupported_frustration,
              "frustration " + std::to_string(f_num) + "/" +
                  std::to_string(f_den) + " is not in the catalog");
}

bool ValidationReport::ok() const {
  for (const auto& c : checks) {
    if (!c.passed) return false;
  }
  return true;
}

const CheckResult* ValidationReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

ValidationReport validate_cell(const FrustrationCell& cell, std::uint64_t seed,
                               int n_points) {
  ValidationReport report;
  auto add = [&](std::string name, bool passed, std::string detail) {
    report.checks.push_back({std::move(name), passed, std::move(detail)});
  };

  const auto nv = static_cast<Eigen::Index>(cell.n_vars);
  const auto np = static_cast<Eigen::Index>(cell.n_phases);

  std::string problems;
  auto need = [&](bool ok, const std::string& what) {
    if (!ok) problems += (problems.empty() ? "" : "; ") + what;
  };
  need(nv > 0 && np > 0, "n_vars and n_phases must be positive");
  need(cell.omega.rows() == nv && cell.omega.cols() == np,
       "omega is " + shape(cell.omega));
  need(cell.phi_dy.rows() == nv && cell.phi_dy.cols() == np,
       "phi_dy is " + shape(cell.phi_dy));
  need(cell.phase_offsets.size() == np, "phase_offsets has " +
                                            std::to_string(cell.phase_offsets.size()) +
                                            " entries");
  need(cell.noise_incidence.rows() == nv, "noise_incidence is " +
                                              shape(cell.noise_incidence));
  need(cell.labels.empty() || cell.labels.size() == cell.n_phases,
       "labels has " + std::to_string(cell.labels.size()) + " entries");
  for (const auto& id : cell.flux_identities) {
    need(id.weights.size() == np, "flux identity with " +
                                      std::to_string(id.weights.size()) +
                                      " weights");
  }
  if (cell.canonical_D) {
    need(cell.canonical_D->rows() == nv && cell.canonical_D->cols() == nv,
         "canonical_D is " + shape(*cell.canonical_D));
  }
  const bool dims_ok = problems.empty();
  add("dimensions", dims_ok, dims_ok ? "consistent" : problems);
  if (!dims_ok) return report;

  if (cell.is_lattice()) {
    const auto n = static_cast<std::size_t>(cell.f_den);
    const bool counts = cell.n_phases == 2 * n && cell.n_vars == n + 1;
    add("phase_count", counts,
        "N=" + std::to_string(n) + ", n_vars=" + std::to_string(cell.n_vars) +
            ", n_phases=" + std::to_string(cell.n_phases));
  }

  bool entries_ok = true;
  for (Eigen::Index i = 0; i < nv; ++i) {
    for (Eigen::Index k = 0; k < np; ++k) {
      const double w = cell.omega(i, k);
      if (w != -1.0 && w != 0.0 && w != 1.0) entries_ok = false;
    }
  }
  add("omega_entries", entries_ok,
      entries_ok ? "all in {-1,0,1}" : "omega has entries outside {-1,0,1}");

  const MatrixXd gram = cell.omega * cell.omega.transpose();
  const Eigen::JacobiSVD<MatrixXd> svd(gram);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0
                          ? sv(0) / sv(sv.size() - 1)
                          : std::numeric_limits<double>::infinity();
  add("incidence_invertible", cond < 1e12,
      "cond(omega omega^T) = " + text::format_real(cond));

  const bool drives_ok =
      cell.drive_x < cell.n_vars &&
      (!cell.drive_y || (*cell.drive_y < cell.n_vars && *cell.drive_y != cell.drive_x));
  add("drive_indices", drives_ok, drives_ok ? "in range" : "drive index out of range");

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-2.0 * pi, 2.0 * pi);
  const AffineMap map = phase_map_y(cell);
  double worst = 0.0;
  for (int s = 0; s < n_points; ++s) {
    VectorXd y(nv);
    for (Eigen::Index j = 0; j < nv; ++j) y(j) = dist(rng);
    const VectorXd phases = map(y);
    for (const auto& id : cell.flux_identities) {
      worst = std::max(worst, std::abs(id.weights.dot(phases) - id.constant));
    }
  }
  add("flux_identities", worst < 1e-12,
      std::to_string(cell.flux_identities.size()) + " identities, max residual " +
          text::format_real(worst));
  return report;
}

VectorXd AffineMap::operator()(const VectorXd& v) const {
  return offsets + linear * v;
}

AffineMap phase_map_y(const FrustrationCell& cell) {
  return {cell.phi_dy.transpose(), cell.phase_offsets};
}

// ---------------------------------------------------------------------------
// Text schema

namespace {

MatrixXd block_matrix(const text::Entry& e, Eigen::Index rows, Eigen::Index cols) {
  if (!e.is_block) {
    throw Error(ErrorKind::parse_error, std::to_string(e.line) + ":" +
                                            std::to_string(e.column) + ": '" +
                                            e.key + "' must be a matrix block");
  }
  if (static_cast<Eigen::Index>(e.rows.size()) != rows) {
    throw Error(ErrorKind::validation_error,
                "'" + e.key + "' needs " + std::to_string(rows) + " rows, got " +
                    std::to_string(e.rows.size()));
  }
  MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& r = e.rows[static_cast<std::size_t>(i)];
    if (static_cast<Eigen::Index>(r.size()) != cols) {
      throw Error(ErrorKind::validation_error,
                  "'" + e.key + "' row " + std::to_string(i + 1) + " needs " +
                      std::to_string(cols) + " entries, got " +
                      std::to_string(r.size()));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      m(i, j) = text::parse_real(r[static_cast<std::size_t>(j)],
                                 e.line + static_cast<int>(i) + 1, 1);
    }
  }
  return m;
}

const text::Entry& required(const text::Document& doc, std::string_view key) {
  const auto* e = doc.find(key);
  if (e == nullptr) {
    throw Error(ErrorKind::validation_error,
                "missing required key '" + std::string(key) + "'");
  }
  return *e;
}

std::size_t parse_index(const text::Entry& e) {
  const double v = text::parse_real(e.value, e.line, e.column);
  if (v < 0 || v != std::floor(v)) {
    throw Error(ErrorKind::validation_error,
                "'" + e.key + "' must be a non-negative integer");
  }
  return static_cast<std::size_t>(v);
}

}  // namespace

FrustrationCell parse_cell(std::string_view source) {
  const text::Document doc = text::parse_document(source);
  static const std::set<std::string, std::less<>> known = {
      "name",   "frustration",     "n_vars",          "n_phases",
      "labels", "drive_x",         "drive_y",         "phase_offsets",
      "omega",  "phi_dy",          "noise_incidence", "canonical_D",
      "flux_identities"};
  for (const auto& e : doc.entries) {
    if (!known.contains(e.key)) {
      throw Error(ErrorKind::validation_error, "unknown cell key '" + e.key + "'");
    }
  }

  FrustrationCell cell;
  if (const auto* e = doc.find("name")) cell.name = e->value;

  const auto& fr = required(doc, "frustration");
  const auto slash = fr.value.find('/');
  if (slash == std::string::npos) {
    throw Error(ErrorKind::parse_error, std::to_string(fr.line) + ":" +
                                            std::to_string(fr.column) +
                                            ": frustration must be 'M/N'");
  }
  try {
    cell.f_num = std::stoi(fr.value.substr(0, slash));
    cell.f_den = std::stoi(fr.value.substr(slash + 1));
  } catch (const std::exception&) {
    throw Error(ErrorKind::parse_error, std::to_string(fr.line) + ":" +
                                            std::to_string(fr.column) +
                                            ": frustration must be 'M/N'");
  }

  cell.n_vars = parse_index(required(doc, "n_vars"));
  cell.n_phases = parse_index(required(doc, "n_phases"));
  const auto nv = static_cast<Eigen::Index>(cell.n_vars);
  const auto np = static_cast<Eigen::Index>(cell.n_phases);

  if (const auto* e = doc.find("labels")) cell.labels = text::split_list(e->value);
  cell.drive_x = parse_index(required(doc, "drive_x"));
  if (const auto* e = doc.find("drive_y"); e != nullptr && e->value != "none") {
    cell.drive_y = parse_index(*e);
  }

  const auto& off = required(doc, "phase_offsets");
  const auto offsets = text::parse_real_list(off.value, off.line, off.column);
  if (static_cast<Eigen::Index>(offsets.size()) != np) {
    throw Error(ErrorKind::validation_error,
                "'phase_offsets' needs " + std::to_string(np) + " entries");
  }
  cell.phase_offsets = Eigen::Map<const VectorXd>(offsets.data(), np);

  cell.omega = block_matrix(required(doc, "omega"), nv, np);
  cell.phi_dy = block_matrix(required(doc, "phi_dy"), nv, np);

  const auto& noise = required(doc, "noise_incidence");
  if (!noise.is_block || noise.rows.empty()) {
    throw Error(ErrorKind::validation_error, "'noise_incidence' must be a block");
  }
  cell.noise_incidence = block_matrix(
      noise, nv, static_cast<Eigen::Index>(noise.rows.front().size()));

  if (const auto* e = doc.find("canonical_D")) {
    cell.canonical_D = block_matrix(*e, nv, nv);
  }
  if (const auto* e = doc.find("flux_identities")) {
    const MatrixXd ids =
        block_matrix(*e, static_cast<Eigen::Index>(e->rows.size()), np + 1);
    for (Eigen::Index r = 0; r < ids.rows(); ++r) {
      cell.flux_identities.push_back({ids.row(r).head(np).transpose(), ids(r, np)});
    }
  }
  return cell;
}

FrustrationCell load_cell(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io_failure, "cannot read cell file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_cell(ss.str());
}

std::string serialize_cell(const FrustrationCell& cell) {
  std::ostringstream out;
  auto row = [&](const auto& values) {
    out << " ";
    for (Eigen::Index j = 0; j < values.size(); ++j) {
      out << " " << text::format_real(values(j));
    }
  };
  auto block = [&](const char* key, const MatrixXd& m) {
    out << key << " =\n";
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      row(m.row(i));
      out << "\n";
    }
    out << "end\n";
  };

  out << "name = " << cell.name << "\n";
  out << "frustration = " << cell.f_num << "/" << cell.f_den << "\n";
  out << "n_vars = " << cell.n_vars << "\n";
  out << "n_phases = " << cell.n_phases << "\n";
  if (!cell.labels.empty()) {
    out << "labels =";
    for (const auto& l : cell.labels) out << " " << l;
    out << "\n";
  }
  out << "drive_x = " << cell.drive_x << "\n";
  out << "drive_y = " << (cell.drive_y ? std::to_string(*cell.drive_y) : "none")
      << "\n";
  out << "phase_offsets =";
  for (Eigen::Index k = 0; k < cell.phase_offsets.size(); ++k) {
    out << " " << text::format_real(cell.phase_offsets(k));
  }
  out << "\n";
  block("omega", cell.omega);
  block("phi_dy", cell.phi_dy);
  block("noise_incidence", cell.noise_incidence);
  if (cell.canonical_D) block("canonical_D", *cell.canonical_D);
  if (!cell.flux_identities.empty()) {
    out << "flux_identities =\n";
    for (const auto& id : cell.flux_identities) {
      row(id.weights);
      out << " " << text::format_real(id.constant) << "\n";
    }
    out << "end\n";
  }
  return out.str();
}

}  // namespace jjwash
