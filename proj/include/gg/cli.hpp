#pragma once

// Batch front-end: experiment configs, and the run / verify / sweep commands
// behind the `gg` executable.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gg/verification.hpp"

namespace gg {

enum ExitCode : int {
  kExitPass = 0,
  kExitConfigError = 2,
  kExitBlowUp = 3,
  kExitVerificationFailure = 4,
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct FitSpec {
  std::string quantity = "energy";
  double t_start = 0.0;
  double t_end = 0.0;  // <= 0 means t_final

  friend bool operator==(const FitSpec&, const FitSpec&) = default;
};

struct ExperimentConfig {
  std::size_t n_points = 256;
  CoefficientSet coefficients;
  bool allow_undamped = false;

  /// "single-mode", "random-smooth seed=<n>" or "two-soliton-like".
  std::string preset = "single-mode";
  double amplitude = 0.1;

  double dt = 0.0;  // 0 selects the integrator default
  unsigned resolved_modes = kDefaultResolvedModes;
  double t_final = 10.0;
  double observe_every = 0.1;
  unsigned n_max = kDefaultMaxOrder;

  std::string output_dir = "gg-out";
  std::string csv = "diagnostics.csv";
  std::string summary = "summary.json";
  std::string svg;  // empty: no plot
  std::string report = "verify.json";
  std::string sweep_csv = "sweep.csv";

  /// Identity ids plus "POINCARE_HOLDER", "PRODUCT_BOUND", "DECAY_FIT";
  /// empty runs everything.
  std::vector<std::string> checks;
  std::vector<FitSpec> fits;
  unsigned verify_states = 10;
  std::uint64_t verify_seed = 1;

  /// Sweep axes: "k", "a3", "amplitude".
  std::map<std::string, std::vector<double>> sweep;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

/// Check ids beyond the identity battery.
inline const std::string kCheckPoincare = "POINCARE_HOLDER";
inline const std::string kCheckProduct = "PRODUCT_BOUND";
inline const std::string kCheckDecayFit = "DECAY_FIT";

/// Throws ConfigError on unknown keys, wrong types or out-of-range values.
/// Coefficient validity is not checked here.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& cfg);

/// Zero-mean-reduced initial state for the config's preset, truncated to the
/// dealiasing cutoff.
SimState initial_state(const ExperimentConfig& cfg);

/// Fits requested by the config, or energy and seminorm_sq_1 over the second
/// half of the run when none are listed.
std::vector<FitSpec> effective_fits(const ExperimentConfig& cfg);

/// Parses "k=0.25,0.5,1" into an axis name and values.
std::pair<std::string, std::vector<double>> parse_axis(const std::string& text);

/// Sweep concurrency: GG_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
unsigned sweep_threads();

/// Writes via a temporary file in the same directory and renames it over
/// `path`.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string diagnostics_csv(const DiagnosticSeries& series);
std::string energy_svg(const DiagnosticSeries& series);

/// Each command writes its artifacts under `out_dir` (or the config's
/// output directory) and reports progress and errors on `log`.
int cmd_run(const ExperimentConfig& cfg, std::ostream& log,
            const std::optional<std::filesystem::path>& out_dir = std::nullopt);
int cmd_verify(const ExperimentConfig& cfg, std::ostream& log,
               const std::optional<std::filesystem::path>& out_dir = std::nullopt);
int cmd_sweep(const ExperimentConfig& cfg, std::ostream& log,
              const std::optional<std::filesystem::path>& out_dir = std::nullopt);

}  // namespace gg
