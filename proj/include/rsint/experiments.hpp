#pragma once

// Named batch experiments.  An experiment is a pure function of its config:
// it produces the full set of output files in memory, and the runner writes
// them (plus a manifest) only once everything has succeeded.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rsint/config.hpp"

namespace rsint {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitRegime = 3,
  kExitAudit = 4,
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct ExperimentOutcome {
  std::vector<OutputFile> files;
  bool audit_failed = false;
  std::string report;  ///< short human-readable summary
};

/// rate, variation_divergence, ll1_sweep, young_table, bounds_audit.
const std::vector<std::string>& experiment_names();

/// Validates the config against the experiment's keys and runs it.  Throws
/// ConfigError, RegimeError, ArgumentError or NumericalError.
ExperimentOutcome run_experiment(const Config& cfg);

struct RunOptions {
  std::optional<std::filesystem::path> output_dir;
  std::optional<std::uint64_t> paths_override;
  std::optional<std::uint64_t> seed_override;
  std::optional<int> threads;
};

/// Loads the config, applies overrides, runs, and writes outputs together
/// with manifest.json.  The output directory is --output-dir, else
/// $RSINT_OUTPUT_DIR, else the config's output_dir, else "rsint_out".
/// Returns an ExitCode; the summary goes to `out`, diagnostics to `err`.
int run_config_file(const std::filesystem::path& config_path, const RunOptions& opts, std::ostream& out,
                    std::ostream& err);

/// Shortest decimal that round-trips to the same double; "nan", "inf".
std::string format_number(double x);

/// SHA-1 of "blob <size>\0" + content, as git computes object ids.
std::string git_blob_sha1(std::string_view content);

}  // namespace rsint
