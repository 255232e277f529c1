#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "optomech/measures.hpp"
#include "optomech/subtraction.hpp"

namespace optomech {

enum class Mode { kPurity, kNonclassicality, kLosses, kState, kFeasibility };
enum class OutputFormat { kCsv, kJson };

std::string to_string(Mode mode);
Mode mode_from_string(const std::string& name);

struct NumericSettings {
  int fock_dim = 80;
  int optical_dim = 25;
  /// Upper limit for the adaptive mechanical cutoff.
  int max_fock_dim = 400;
  int grid_points = 512;
  bool refine = true;

  bool operator==(const NumericSettings&) const = default;
};

/// Device figures for the feasibility estimate. Rates in rad/s, times in s.
struct FeasibilityInputs {
  double omega_m = 2.0 * 3.141592653589793 * 5.2e9;
  double kappa = 2.0 * 3.141592653589793 * 1.0e9;
  double kappa_ex = 2.0 * 3.141592653589793 * 0.8e9;
  double gamma_m = 2.0 * 3.141592653589793 * 1.0e5;
  double t_bath = 0.5;
  double g0 = 2.0 * 3.141592653589793 * 1.0e6;
  double n_cav = 40.0;
  double t_pulse = 10e-9;
  /// Efficiencies multiplied onto kappa_ex / kappa.
  std::vector<double> efficiency_factors{0.25};
  double cooperativity = 200.0;
  /// Lower-sideband squeezing drive; when positive it sets C = 4 g^2 / (kappa gamma_m).
  double squeeze_g_minus = 0.0;
  /// Repetition PERIOD of the full protocol.
  double rep_period = 10e-6;
  double target_events = 100.0;

  bool operator==(const FeasibilityInputs&) const = default;
};

/// Complete description of a run. Serializes to JSON with the same field
/// names; missing fields take the per-mode defaults.
struct SweepConfig {
  Mode mode = Mode::kState;
  std::vector<double> r;
  std::vector<double> cooperativity;
  std::vector<double> n_eff;
  /// Purity targets for the C(r) contours.
  std::vector<double> n_eff_targets;
  std::vector<double> eta;
  std::vector<int> m;
  /// Beamsplitter angle for the nonclassicality and state modes.
  double theta = 0.1;
  /// Loss-sweep angle for m = 1, 2, 3.
  std::vector<double> loss_theta{0.05, 0.1, 0.1};
  double n_th = 2.0;
  double kappa_over_gamma = 1e7;
  NumericSettings numerics;
  FeasibilityInputs feasibility;
  std::string output;
  OutputFormat format = OutputFormat::kCsv;
  /// Directory for state and Wigner dumps; empty disables them.
  std::string dump_dir;
  /// Include wall-clock time in JSON records (breaks byte-identical reruns).
  bool timing = true;

  bool operator==(const SweepConfig&) const = default;
};

SweepConfig default_config(Mode mode);

/// Throws ConfigError for values outside the regimes the modules accept.
void validate(const SweepConfig& cfg);

nlohmann::ordered_json to_json(const SweepConfig& cfg);

/// Parses a config document, or the "config" member of a run record.
/// Lists may be given as arrays or as {"start", "stop", "num"} objects.
SweepConfig sweep_config_from_json(const nlohmann::json& j);

/// Result table plus provenance. Rows are JSON objects whose keys follow
/// `columns`; missing results are null.
struct RunRecord {
  SweepConfig config;
  std::vector<std::string> columns;
  std::vector<nlohmann::ordered_json> rows;
  std::vector<std::string> assumptions;
  double wall_clock_seconds = 0.0;
  /// Points that failed with a cutoff, grid or convergence error.
  int nonconverged = 0;
};

nlohmann::ordered_json to_json(const RunRecord& record);
void write_csv(std::ostream& os, const RunRecord& record);
/// Writes the record in the configured format to cfg.output, or to stdout
/// when the output path is empty or "-".
void write_record(const RunRecord& record);

/// One heralding point of the (r, n_eff, theta, eta, m) family.
struct PointSpec {
  double r = 0.0;
  double n_eff = 0.0;
  double theta = 0.0;
  double eta = 1.0;
  int m = 0;
};

/// Heralded state at the smallest cutoff (from settings.fock_dim in steps of
/// 40) whose tail is converged, cross-checked at twice that cutoff.
struct PreparedState {
  HeraldedResult result;
  int fock_dim = 0;
  /// Largest change of P, <n>, variances and purity under cutoff doubling.
  double fock_delta = 0.0;
};

/// Throws ConvergenceError when doubling the cutoff moves any scalar by more
/// than 1e-6 (relative for P).
PreparedState prepare_state(const PointSpec& point, const NumericSettings& settings);

RunRecord run_purity_sweep(const SweepConfig& cfg, int threads = 0);
RunRecord run_nonclassicality_sweep(const SweepConfig& cfg, int threads = 0);
RunRecord run_loss_sweep(const SweepConfig& cfg, int threads = 0);
RunRecord run_feasibility(const SweepConfig& cfg);
RunRecord dump_state(const SweepConfig& cfg);

/// Dispatches on cfg.mode. `threads` <= 0 uses every available core.
RunRecord run(const SweepConfig& cfg, int threads = 0);

/// Bose occupancy 1 / (exp(hbar omega / k T) - 1).
double bose_occupancy(double omega, double temperature);

/// Smallest C in [1, 1e5] with purity_tradeoff(r, C) <= target, by bisection
/// in log C to relative width 1e-3. Throws ConvergenceError when the target
/// is not bracketed.
double cooperativity_for(double r, double n_eff_target, double n_th, double kappa_over_gamma);

}  // namespace optomech
