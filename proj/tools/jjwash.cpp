// Command-line front end. Every flag maps onto a run-spec key; a --config
// file is applied first and flags given on the command line override it.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jjwash/error.hpp"
#include "jjwash/run_spec.hpp"
#include "jjwash/runner.hpp"

namespace {

struct Flag {
  const char* name;
  const char* key;
  const char* help;
};

// Shared by every subcommand.
const Flag common_flags[] = {
    {"--f", "f", "frustration of a catalog cell: 1/2, 1/3 or single_junction"},
    {"--cell-file", "cell_file", "custom cell file (overrides --f)"},
    {"--Ix", "Ix", "applied current along x, units of I_c per cell"},
    {"--Iy", "Iy", "applied current along y, units of I_c per cell"},
    {"--omega", "omega", "noise intensity Omega (dimensionless)"},
    {"--beta-c", "beta_c", "Stewart-McCumber parameter"},
    {"--dt", "dt", "time step, units of tau"},
    {"--steps", "steps", "number of integration steps"},
    {"--seed", "seed", "base RNG seed"},
    {"--out", "out", "output directory"},
    {"--noise", "noise", "noise covariance: derived or isotropic"},
};

const Flag slice_flags[] = {
    {"--fix", "fix", "fixed axes, e.g. z=-pi or x=0,z=pi/2 (radians)"},
    {"--free", "free", "the two free axes, e.g. x,y"},
    {"--range", "range", "window lo0,hi0,lo1,hi1 (default: one period)"},
    {"--resolution", "resolution", "grid points per free axis"},
};

const Flag stationary_flags[] = {
    {"--grid", "grid", "Newton seeds per axis"},
};

const Flag boundary_flags[] = {
    {"--r-grid", "r_grid", "number of ratios R = Iy/Ix in [0, 1]"},
    {"--cross-validate", "cross_validate", "check against continuation: true or false"},
};

const Flag simulate_flags[] = {
    {"--scheme", "scheme", "underdamped, overdamped or hamiltonian"},
    {"--seeds", "seeds", "number of independent trajectories"},
    {"--stride", "stride", "record every n-th step"},
    {"--init", "init", "initial position, comma separated"},
    {"--init-v", "init_v", "initial velocity, comma separated"},
    {"--window", "window", "trailing fraction of the run used for mean velocities"},
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw jjwash::Error(jjwash::ErrorKind::io_failure, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int report(const std::string& kind, const std::string& message, int code) {
  std::cerr << jjwash::error_record(kind, message, code).dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tilted washboard potentials of frustrated Josephson-junction arrays"};
  app.require_subcommand(1);
  app.set_version_flag("--version", jjwash::version());

  std::map<std::string, std::string> values;  // key -> raw flag text
  std::string config;
  std::map<CLI::App*, jjwash::Subcommand> commands;

  auto add = [&](const char* name, const char* help, jjwash::Subcommand sub,
                 std::initializer_list<const Flag*> groups, std::initializer_list<std::size_t> sizes) {
    CLI::App* cmd = app.add_subcommand(name, help);
    commands[cmd] = sub;
    cmd->add_option("--config", config, "run-spec file applied before the flags");
    for (const Flag& f : common_flags) cmd->add_option(f.name, values[f.key], f.help);
    auto size = sizes.begin();
    for (const Flag* group : groups) {
      for (std::size_t i = 0; i < *size; ++i) {
        cmd->add_option(group[i].name, values[group[i].key], group[i].help);
      }
      ++size;
    }
  };
  using S = jjwash::Subcommand;
  add("cell", "write and validate the unit-cell definition", S::cell, {}, {});
  add("derive", "derive S and D and check exactness", S::derive, {}, {});
  add("slice", "evaluate U on a two-dimensional slice", S::slice, {slice_flags},
      {std::size(slice_flags)});
  add("stationary", "locate and classify fixed points", S::stationary, {stationary_flags},
      {std::size(stationary_flags)});
  add("boundary", "pinned-region boundary in the current plane (f = 1/2)", S::boundary,
      {boundary_flags}, {std::size(boundary_flags)});
  add("simulate", "integrate Langevin trajectories", S::simulate, {simulate_flags},
      {std::size(simulate_flags)});

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  jjwash::RunSpec spec;
  try {
    if (!config.empty()) spec = jjwash::parse_run_spec(read_file(config));
    for (const auto& [cmd, sub] : commands) {
      if (cmd->parsed()) spec.subcommand = sub;
    }
    for (const auto& [key, value] : values) {
      if (!value.empty()) jjwash::apply_setting(spec, key, value);
    }
    jjwash::validate(spec);
  } catch (const jjwash::Error& e) {
    return report(std::string(jjwash::to_string(e.kind())), e.what(),
                  jjwash::exit_code(e.kind()));
  }

  const jjwash::RunRecord record = jjwash::run(spec);
  if (record.failed) return report(record.error_kind, record.error_message, record.exit_code);
  std::cout << spec.out << "/manifest.json\n";
  return 0;
}
