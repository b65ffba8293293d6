#include "jjwash/runner.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <numbers>
#include <sstream>
#include <thread>
#include <cstdio>
#include <exception>
#include <memory>

#include "jjwash/cell.hpp"
#include "jjwash/dynamics.hpp"
#include "jjwash/half_cell.hpp"
#include "jjwash/potential.hpp"
#include "jjwash/stationary.hpp"
#include "jjwash/text_format.hpp"
#include "jjwash/transform.hpp"

namespace jjwash {

namespace fs = std::filesystem;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using nlohmann::json;

const char* version() { return "0.1.0"; }

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &length, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorKind::io_failure, "SHA-256 computation failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 0xf];
  }
  return out;
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io_failure, "cannot read " + path);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

json error_record(const std::string& kind, const std::string& message, int exit_code) {
  return {{"error", kind}, {"message", message}, {"exit_code", exit_code}};
}

json export_manifest(const RunRecord& record) {
  json files = json::array();
  for (const Artifact& a : record.artifacts) {
    files.push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
  }
  json m = {
      {"tool", "jjwash"},
      {"version", version()},
      {"subcommand", std::string(to_string(record.spec.subcommand))},
      {"spec", echo_run_spec(record.spec)},
      {"seed", record.spec.seed},
      {"streams", record.streams},
      {"wall_time_s", record.wall_time_s},
      {"complete", record.complete},
      {"files", files},
  };
  if (record.failed) {
    m["error"] = error_record(record.error_kind, record.error_message, record.exit_code);
  }
  return m;
}

namespace {

json to_json(const VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

json to_json(const MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const VectorXd row = m.row(i).transpose();
    rows.push_back(to_json(row));
  }
  return rows;
}

// JSON cannot hold NaN; absent values become null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

class Output {
 public:
  Output(RunRecord& record, const std::chrono::steady_clock::time_point& start)
      : record_(record), start_(start), dir_(record.spec.out) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::io_failure, "cannot create " + dir_.string() + ": " + ec.message());
    write_manifest();
  }

  void write(const std::string& name, const std::string& content) {
    write_raw(name, content);
    record_.artifacts.push_back(
        {name, sha256_hex(content), static_cast<std::uintmax_t>(content.size())});
    write_manifest();
  }

  void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

  void write_manifest() {
    record_.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_raw("manifest.json", export_manifest(record_).dump(2) + "\n");
  }

 private:
  void write_raw(const std::string& name, const std::string& content) {
    const fs::path target = dir_ / name;
    const fs::path tmp = dir_ / (name + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::io_failure, "cannot write " + tmp.string());
      out << content;
      if (!out) throw Error(ErrorKind::io_failure, "write failed for " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorKind::io_failure, "cannot move " + tmp.string() + ": " + ec.message());
  }

  RunRecord& record_;
  std::chrono::steady_clock::time_point start_;
  fs::path dir_;
};

FrustrationCell resolve_cell(const RunSpec& spec) {
  if (!spec.cell_file.empty()) return load_cell(spec.cell_file);
  return builtin_cell(spec.frustration);
}

bool is_half_cell(const FrustrationCell& cell) {
  return cell.f_num == 1 && cell.f_den == 2 && cell.n_vars == 3;
}

std::size_t axis_index(const std::string& name, std::size_t dim, std::string_view key) {
  for (std::size_t i = 0; i < dim; ++i) {
    if (axis_name(i, dim) == name) return i;
  }
  throw Error(ErrorKind::bad_slice_spec,
              std::string(key) + ": unknown axis '" + name + "' for a " +
                  std::to_string(dim) + "-dimensional potential");
}

VectorXd initial_position(const RunSpec& spec, std::size_t dim) {
  if (spec.init.empty()) return VectorXd::Zero(static_cast<Eigen::Index>(dim));
  if (spec.init.size() != dim) {
    throw Error(ErrorKind::dimension_mismatch,
                "init has " + std::to_string(spec.init.size()) + " entries, expected " +
                    std::to_string(dim));
  }
  return Eigen::Map<const VectorXd>(spec.init.data(), static_cast<Eigen::Index>(dim));
}

json fixed_point_json(const TiltedPotential& p, const FixedPoint& fp) {
  return {{"x", to_json(fp.x)},
          {"energy", p.energy(fp.x)},
          {"classification", std::string(to_string(fp.classification))},
          {"eigenvalues", to_json(fp.eigenvalues)},
          {"residual", fp.residual},
          {"iterations", fp.iterations}};
}

void run_cell(const FrustrationCell& cell, Output& out) {
  out.write("cell.txt", serialize_cell(cell));
  const ValidationReport report = validate_cell(cell);
  json checks = json::array();
  for (const CheckResult& c : report.checks) {
    checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  out.write_json("validation.json", {{"cell", cell.name}, {"ok", report.ok()}, {"checks", checks}});
  if (!report.ok()) {
    for (const CheckResult& c : report.checks) {
      if (!c.passed) {
        throw Error(ErrorKind::validation_error, "cell check '" + c.name + "' failed: " + c.detail);
      }
    }
  }
}

void run_derive(const FrustrationCell& cell, Output& out) {
  const TargetMatrix target = compute_target(cell);
  const TransformMatrix t = factor_transform(target, cell.canonical_D);
  const double residual = (t.D.transpose() * t.D - 2.0 * target.S).cwiseAbs().maxCoeff();
  out.write_json("target.json", {{"cell", cell.name}, {"S", to_json(target.S)}});
  out.write_json("transform.json", {{"cell", cell.name},
                                    {"D", to_json(t.D)},
                                    {"D_inv", to_json(t.D_inv)},
                                    {"canonical", cell.canonical_D.has_value()},
                                    {"condition_residual", residual}});
  const ExactnessReport ex = verify_exactness(cell, t);
  out.write_json("exactness.json", {{"cell", cell.name},
                                    {"passed", ex.passed()},
                                    {"coefficient_mismatch", ex.coefficient_mismatch},
                                    {"x_asymmetry", ex.x_asymmetry},
                                    {"y_asymmetry", ex.y_asymmetry},
                                    {"n_points", ex.n_points},
                                    {"drift_coefficients", to_json(drift_coefficients(cell, t))}});
}

void run_slice(const RunSpec& spec, const TiltedPotential& p, Output& out) {
  const std::size_t dim = p.dim();
  std::map<std::size_t, double> fixed;
  for (const auto& [name, value] : spec.fix) fixed[axis_index(name, dim, "fix")] = value;

  SliceSpec s = default_slice(p, fixed, spec.resolution);
  if (!spec.free.empty()) {
    s.free = {axis_index(spec.free[0], dim, "free"), axis_index(spec.free[1], dim, "free")};
  } else {
    std::vector<std::size_t> open;
    for (std::size_t i = 0; i < dim; ++i) {
      if (!fixed.count(i)) open.push_back(i);
    }
    if (open.size() != 2) {
      throw Error(ErrorKind::bad_slice_spec,
                  "fix: " + std::to_string(open.size()) +
                      " axes left free, a slice needs exactly two");
    }
    s.free = {open[0], open[1]};
  }
  for (int a = 0; a < 2; ++a) {
    const double period = p.period()(static_cast<Eigen::Index>(s.free[a]));
    const double half = std::isfinite(period) ? period / 2 : 2 * std::numbers::pi;
    s.lower[a] = -half;
    s.upper[a] = half;
  }
  if (spec.range.size() == 4) {
    s.lower = {spec.range[0], spec.range[2]};
    s.upper = {spec.range[1], spec.range[3]};
  }
  const SliceGrid grid = slice_grid(p, s);

  const std::string n0 = axis_name(s.free[0], dim);
  const std::string n1 = axis_name(s.free[1], dim);
  std::ostringstream csv;
  csv << "# Ix = " << text::format_real(p.current_x()) << "\n";
  csv << "# Iy = " << text::format_real(p.current_y()) << "\n";
  for (const auto& [axis, value] : s.fixed) {
    csv << "# " << axis_name(axis, dim) << " = " << text::format_real(value) << "\n";
  }
  csv << n0 << ',' << n1 << ",U\n";
  for (std::size_t i = 0; i < grid.axis0.size(); ++i) {
    for (std::size_t j = 0; j < grid.axis1.size(); ++j) {
      csv << text::format_real(grid.axis0[i]) << ',' << text::format_real(grid.axis1[j]) << ','
          << text::format_real(grid.at(i, j)) << '\n';
    }
  }
  out.write("slice.csv", csv.str());

  json fixed_json = json::object();
  for (const auto& [axis, value] : s.fixed) fixed_json[axis_name(axis, dim)] = value;
  const auto [lo, hi] = std::minmax_element(grid.values.begin(), grid.values.end());
  out.write_json("slice.json", {{"free", {n0, n1}},
                                {"fixed", fixed_json},
                                {"lower", s.lower},
                                {"upper", s.upper},
                                {"resolution", s.resolution},
                                {"Ix", p.current_x()},
                                {"Iy", p.current_y()},
                                {"tilt", to_json(p.tilt())},
                                {"U_min", *lo},
                                {"U_max", *hi}});
}

void run_stationary(const RunSpec& spec, const FrustrationCell& cell, const TiltedPotential& p,
                    Output& out) {
  NewtonOptions opts;
  opts.target = FixedPointTarget::any_stationary;
  const std::vector<FixedPoint> points =
      sweep_fixed_points(p, static_cast<int>(spec.grid), opts);
  json list = json::array();
  const bool half = is_half_cell(cell);
  for (const FixedPoint& fp : points) {
    json entry = fixed_point_json(p, fp);
    if (half) {
      const half::AuxiliaryCheck aux =
          half::check_auxiliary_relations(fp.x, p.current_x(), p.current_y());
      entry["relations"] = {{"defining", number(aux.defining)},
                            {"tangent", number(aux.tangent)},
                            {"sine_ratio", number(aux.sine_ratio)}};
    }
    list.push_back(entry);
  }
  std::size_t minima = 0;
  for (const FixedPoint& fp : points) minima += fp.classification == Stability::minimum;
  out.write_json("fixed_points.json", {{"Ix", p.current_x()},
                                       {"Iy", p.current_y()},
                                       {"seeds_per_axis", spec.grid},
                                       {"n_minima", minima},
                                       {"pinned", minima > 0},
                                       {"points", list}});
  if (half) {
    const half::CriticalPoint cp = half::critical_current_uniaxial();
    Eigen::VectorXd x(3);
    x << cp.x, 0.0, cp.z;
    const Eigen::SelfAdjointEigenSolver<MatrixXd> eig(
        half::potential(cp.current, 0.0).hessian(x));
    out.write_json("critical.json", {{"I_crit", cp.current},
                                     {"x_crit", cp.x},
                                     {"z_crit", cp.z},
                                     {"I_crit_numeric", cp.current_numeric},
                                     {"x_crit_numeric", cp.x_numeric},
                                     {"z_crit_numeric", cp.z_numeric},
                                     {"hessian_eigenvalues", to_json(eig.eigenvalues())}});
  }
}

void run_boundary(const RunSpec& spec, const FrustrationCell& cell, Output& out) {
  if (!is_half_cell(cell)) {
    throw Error(ErrorKind::validation_error, "f: the pinned boundary is only available for f = 1/2");
  }
  half::BoundaryOptions opts;
  opts.cross_validate = spec.cross_validate;
  const std::vector<double> ratios = half::uniform_ratio_grid(spec.r_grid);
  const half::PinnedBoundaryCurve curve = half::pinned_boundary(ratios, opts);
  std::ostringstream csv;
  csv << "R,I_max,method,residual,continuation,tracked_root\n";
  for (const half::BoundarySample& s : curve.samples) {
    csv << text::format_real(s.ratio) << ',' << text::format_real(s.current_max) << ','
        << to_string(curve.method) << ',' << text::format_real(s.residual) << ','
        << text::format_real(s.continuation) << ',' << text::format_real(s.tracked_root) << '\n';
  }
  out.write("boundary.csv", csv.str());
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream csv;
  const std::size_t dim = traj.positions.empty() ? 0 : static_cast<std::size_t>(traj.positions[0].size());
  csv << "# seed = " << traj.seed << "\n# stream = " << traj.stream
      << "\n# dt = " << text::format_real(traj.dt) << "\n# scheme = " << to_string(traj.scheme)
      << "\nt";
  for (std::size_t i = 0; i < dim; ++i) csv << ',' << axis_name(i, dim);
  if (traj.has_velocities()) {
    for (std::size_t i = 0; i < dim; ++i) csv << ",v_" << axis_name(i, dim);
  }
  csv << '\n';
  for (std::size_t f = 0; f < traj.times.size(); ++f) {
    csv << text::format_real(traj.times[f]);
    for (Eigen::Index i = 0; i < traj.positions[f].size(); ++i) {
      csv << ',' << text::format_real(traj.positions[f](i));
    }
    if (traj.has_velocities()) {
      for (Eigen::Index i = 0; i < traj.velocities[f].size(); ++i) {
        csv << ',' << text::format_real(traj.velocities[f](i));
      }
    }
    csv << '\n';
  }
  return csv.str();
}

void run_simulate(const RunSpec& spec, RunRecord& record, const TiltedPotential& p, Output& out) {
  SimulationConfig cfg;
  cfg.scheme = spec.scheme;
  cfg.beta_c = spec.beta_c;
  cfg.dt = spec.dt;
  cfg.n_steps = spec.steps;
  cfg.seed = spec.seed;
  cfg.record_stride = spec.stride;
  validate(cfg, p);

  State init{initial_position(spec, p.dim()), VectorXd()};
  if (!spec.init_v.empty()) {
    if (spec.init_v.size() != p.dim()) {
      throw Error(ErrorKind::dimension_mismatch, "init_v does not match the potential dimension");
    }
    init.v = Eigen::Map<const VectorXd>(spec.init_v.data(), static_cast<Eigen::Index>(p.dim()));
  }

  // Independent trajectories are computed in parallel and written in order.
  const std::size_t n = spec.seeds;
  std::vector<Trajectory> results(n);
  std::vector<std::exception_ptr> failures(n);
  const std::size_t workers =
      std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n);
  auto work = [&](std::size_t first) {
    for (std::size_t k = first; k < n; k += workers) {
      try {
        SimulationConfig c = cfg;
        c.stream = k;
        results[k] = simulate(p, c, init);
      } catch (...) {
        failures[k] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (std::thread& t : pool) t.join();
  }

  json per_trajectory = json::array();
  for (std::size_t k = 0; k < n; ++k) {
    if (failures[k]) std::rethrow_exception(failures[k]);
    record.streams.push_back(k);
    char name[32];
    std::snprintf(name, sizeof name, "trajectory_%04zu.csv", k);
    out.write(name, trajectory_csv(results[k]));
    per_trajectory.push_back({{"file", name},
                              {"stream", k},
                              {"dt_used", results[k].dt},
                              {"retries", results[k].retries},
                              {"mean_velocity", to_json(mean_voltage(results[k], spec.window))},
                              {"final_position", to_json(results[k].positions.back())}});
  }
  VectorXd mean = VectorXd::Zero(static_cast<Eigen::Index>(p.dim()));
  for (const json& t : per_trajectory) {
    const std::vector<double> v = t["mean_velocity"].get<std::vector<double>>();
    mean += Eigen::Map<const VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
  }
  mean /= static_cast<double>(n);
  out.write_json("summary.json", {{"config", echo_run_spec(spec)},
                                  {"noise_cov", to_json(p.noise_cov())},
                                  {"tilt", to_json(p.tilt())},
                                  {"mean_velocity", to_json(mean)},
                                  {"trajectories", per_trajectory}});
}

}  // namespace

RunRecord run(const RunSpec& spec) {
  const auto start = std::chrono::steady_clock::now();
  RunRecord record;
  record.spec = spec;
  std::unique_ptr<Output> out;
  auto fail = [&](const std::string& kind, const std::string& message, int code) {
    record.failed = true;
    record.complete = false;
    record.error_kind = kind;
    record.error_message = message;
    record.exit_code = code;
    if (out) {
      try {
        out->write_manifest();
      } catch (const Error&) {
        // The error record still reaches the caller.
      }
    }
  };
  try {
    validate(spec);
    out = std::make_unique<Output>(record, start);
    const FrustrationCell cell = resolve_cell(spec);
    switch (spec.subcommand) {
      case Subcommand::cell:
        run_cell(cell, *out);
        break;
      case Subcommand::derive:
        run_derive(cell, *out);
        break;
      default: {
        const TransformMatrix t = derive_transform(cell);
        const TiltedPotential p =
            build_potential(cell, t, spec.current_x, spec.current_y, spec.omega, spec.noise);
        if (spec.subcommand == Subcommand::slice) run_slice(spec, p, *out);
        if (spec.subcommand == Subcommand::stationary) run_stationary(spec, cell, p, *out);
        if (spec.subcommand == Subcommand::boundary) run_boundary(spec, cell, *out);
        if (spec.subcommand == Subcommand::simulate) run_simulate(spec, record, p, *out);
      }
    }
    record.complete = true;
    out->write_manifest();
  } catch (const Error& e) {
    fail(std::string(to_string(e.kind())), e.what(), exit_code(e.kind()));
  } catch (const std::exception& e) {
    fail("internal", e.what(), 1);
  }
  return record;
}

}  // namespace jjwash
