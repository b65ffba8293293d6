#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "jjwash/error.hpp"
#include "jjwash/run_spec.hpp"

namespace jjwash {

struct Artifact {
  std::string path;  // relative to the output directory
  std::string sha256;
  std::uintmax_t bytes = 0;
};

struct RunRecord {
  RunSpec spec;
  std::vector<Artifact> artifacts;
  std::vector<std::uint64_t> streams;  // one RNG stream per trajectory
  double wall_time_s = 0.0;
  bool complete = false;
  // Set when the run failed; error_kind is "internal" for unexpected errors.
  bool failed = false;
  std::string error_kind;
  std::string error_message;
  int exit_code = 0;
};

/// Executes the subcommand and writes its artifacts plus manifest.json into
/// spec.out. Module errors are caught and turned into an error record and a
/// nonzero exit code; the manifest is rewritten after every artifact so an
/// interrupted run leaves a manifest with complete = false.
RunRecord run(const RunSpec& spec);

/// Manifest document for the record. Hashes are taken from the record.
nlohmann::json export_manifest(const RunRecord& record);

/// Machine-readable error record printed by the CLI.
nlohmann::json error_record(const std::string& kind, const std::string& message,
                            int exit_code);

/// Lower-case hex SHA-256 of a file. Throws io_failure.
std::string sha256_file(const std::string& path);
std::string sha256_hex(const std::string& bytes);

const char* version();

}  // namespace jjwash
