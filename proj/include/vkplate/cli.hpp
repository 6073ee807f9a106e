#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "vkplate/verify.hpp"

namespace vkplate {

/// Stable process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitVerifyFailed = 1,
  kExitConfigError = 2,
  kExitNumericalError = 3,
  kExitNoConvergence = 4,
};

/// Malformed configuration text or flag value.
class ConfigError : public ParameterError {
 public:
  using ParameterError::ParameterError;
};

/// Everything a command needs. Lambda-like values may be written as a plain
/// number or as a multiple of the least eigenvalue ("1.05*lambda1").
struct RunConfig {
  PlateConfig plate;         ///< plate.lambda is ignored; see lam
  std::string lam = "0";
  int M = 16;
  int N = 48;
  double lam_max = 50.0;     ///< spectrum: enumerate eigenvalues below this
  std::string lam_from = "0.9*lambda1";
  std::string lam_to = "1.03*lambda1";
  int steps = 30;
  std::string load = "zero";  ///< zero | sinx | e1
  double load_amplitude = 0.0;
  bool mountain_pass = true;  ///< solve: look for a saddle between opposite minima
  int plot_nx = 41;
  int plot_ny = 9;
  SolverOptions solver;
  std::string out = "out";
  std::string only;            ///< verify: run a single suite

  /// The raw key/value pairs as given, for the metadata echo.
  std::map<std::string, std::string> given;
};

/// Sets one documented key. Throws ConfigError for unknown keys or values
/// that do not parse.
void set_config_value(RunConfig& rc, const std::string& key, const std::string& value);

/// Parses "key = value" lines; '#' starts a comment.
void parse_config_text(RunConfig& rc, const std::string& text);
void load_config_file(RunConfig& rc, const std::string& path);

/// Numeric value of a lambda-like string, e.g. "0.5", "1.05*lambda1", "lambda1".
double resolve_lambda(const std::string& text, const PlateConfig& cfg);

/// plate with lambda resolved from lam.
PlateConfig effective_plate(const RunConfig& rc);

/// Physical and numerical validation (ParameterError naming the violation).
void validate_run_config(const RunConfig& rc);

/// Documented configuration keys with one-line help, in a stable order.
const std::vector<std::pair<std::string, std::string>>& config_keys();

int cmd_spectrum(const RunConfig& rc, std::ostream& log);
int cmd_solve(const RunConfig& rc, std::ostream& log);
int cmd_sweep(const RunConfig& rc, std::ostream& log);
int cmd_verify(const RunConfig& rc, std::ostream& log);

/// Dispatches a command name and maps exceptions to exit codes.
int run_command(const std::string& command, const RunConfig& rc, std::ostream& log, std::ostream& err);

}  // namespace vkplate
