#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "adiabat/gibbs.hpp"
#include "adiabat/profiles.hpp"

namespace adiabat {

/// Pass thresholds of every experiment. The acceptance suite and the CLI
/// both read them from here.
namespace thresholds {
inline constexpr double homological_residual = 1e-9;
inline constexpr double transform_identity = 1e-10;
inline constexpr double fast_transform_agreement = 1e-12;
inline constexpr double energy_fluctuation = 1e-4;
inline constexpr double sum_constraint = 1e-12;
inline constexpr double moment_z = 3.0;
inline constexpr double lemma5_ratio = 0.7;
inline constexpr double lemma5_signal_z = 3.0;
inline constexpr double lemma3_band = 3.0;
inline constexpr double theorem1_slope_lo = -1.3;
inline constexpr double theorem1_slope_hi = -0.8;
inline constexpr double corrector_slope_lo = -0.7;
inline constexpr double corrector_slope_hi = -0.3;
inline constexpr double persistence_level = 0.5;
inline constexpr double half_life_ratio = 2.0;
inline constexpr double chebyshev_z = 3.0;
inline constexpr double theorem2_refinement = 0.05;
inline constexpr double theorem2_divergence = 2.0;
inline constexpr int theorem2_min_profiles = 5;
inline constexpr double lemma4_constant = 16.0;
/// "Within combined error" in trend checks means within this many
/// combined standard errors.
inline constexpr double trend_z = 2.0;
}  // namespace thresholds

struct ExperimentInfo {
  std::string name;
  std::string description;
  std::vector<std::string> columns;
  /// Acceptance criteria (1-based) this experiment decides.
  std::vector<int> criteria;
};

const std::vector<ExperimentInfo>& experiment_catalog();
const ExperimentInfo& experiment_info(std::string_view name);

/// Parsed configuration with every default filled in. `echo` is the same
/// content as JSON, written back into the run metadata.
struct ExperimentConfig {
  std::string experiment;
  std::uint64_t seed = 0;
  std::vector<int> n_list;
  std::vector<double> beta_list;
  double a = 1.0;
  NuProfile profile = default_packet_profile();
  int n_samples = 0;
  double dt = 0.02;
  std::vector<double> t_grid;
  SamplerSettings sampler;
  std::string output;

  // Experiment-specific knobs; only the ones listed for the experiment are
  // accepted in the file.
  double exponent_a = 0.4;
  int packets = 4;
  std::vector<int> grid_sizes;
  std::vector<int> divergence_grids;
  std::vector<std::string> functions;
  int energy_n = 255;
  int energy_states = 4;
  double t_final = 1000.0;
  double horizon_factor = 4.0;
  double min_horizon = 0.0;
  double persistence_beta = 100.0;
  int slab_n = 8;
  std::vector<int> covariance_n;
  int covariance_samples = 0;

  nlohmann::json echo;
};

/// Parses and validates a JSON config. Throws Error(config) naming the line
/// or the offending field.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Profile as it appears in configs: {"kind": "bump", "center": ..., ...}.
NuProfile profile_from_json(const nlohmann::json& j);
nlohmann::json profile_to_json(const NuProfile& profile);

/// Field names accepted for an experiment, including the common ones.
std::vector<std::string> allowed_fields(std::string_view experiment);

struct CheckResult {
  std::string name;
  int criterion = 0;  // 0 when the check is not an acceptance criterion
  bool passed = false;
  std::string detail;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string to_string() const;
};

struct ExperimentResult {
  std::string experiment;
  CsvTable table;
  std::vector<CheckResult> checks;
  nlohmann::json diagnostics = nlohmann::json::object();

  bool passed() const;
  const CheckResult* first_failure() const;
};

ExperimentResult run_experiment(const ExperimentConfig& config, int threads = 1);

/// results.csv, metadata.json and summary.txt in `dir` (created if needed).
void write_outputs(const ExperimentConfig& config, const ExperimentResult& result,
                   const std::filesystem::path& dir, double wall_seconds);

std::string summary_text(const ExperimentResult& result);

/// Formats numbers for the CSV: integers plainly, reals with 17 significant
/// digits so that reruns compare byte for byte.
std::string format_number(double value);

const char* build_description();

}  // namespace adiabat
