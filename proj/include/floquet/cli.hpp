#pragma once

// floquet-bands command-line front end. The command functions are exposed
// so they can be driven in-process by tests.

#include <iosfwd>
#include <string>
#include <string_view>

#include "floquet/errors.hpp"

namespace floquet::cli {

enum ExitCode : int {
  kExitPass = 0,
  kExitUsage = 1,
  kExitInvalidPotential = 2,
  kExitIdentityFailure = 3,
  kExitNumerical = 4,
};

enum class OutputFormat { Csv, Json };

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct RunConfig {
  std::string potential;  ///< DSL text; wins over `preset`
  std::string preset;     ///< free | mathieu | pt-lattice | pt-exp
  double v0 = 0.3;        ///< pt-lattice strength
  double e_min = -2.0;
  double e_max = 30.0;
  int n_samples = 200;
  int steps_per_period = 4096;
  int hill_N = 24;
  double tol_identity = 1e-8;
  double tol_root = 1e-10;
  double merge_tol = 1e-6;
  OutputFormat output_format = OutputFormat::Csv;
  std::string output_path;  ///< empty writes to stdout
  unsigned threads = 0;     ///< 0 = hardware concurrency

  /// DSL text of the potential after preset expansion.
  std::string potential_text() const;
  /// Throws ConfigError on inconsistent values.
  void validate() const;
};

/// DSL text for a named preset; ConfigError for unknown names.
std::string preset_potential(std::string_view name, double v0);

/// Overlays keys of a JSON object (RunConfig field names) onto `cfg`.
void apply_config_json(std::string_view json_text, RunConfig& cfg);
void apply_config_file(const std::string& path, RunConfig& cfg);

/// Parses "a:b".
void parse_energy_range(std::string_view text, double& e_min, double& e_max);

/// Reads FLOQUET_BANDS_THREADS; 0 when unset.
unsigned threads_from_env();

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_bands(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_hill_compare(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command line: parse, dispatch, map errors to exit codes.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace floquet::cli
