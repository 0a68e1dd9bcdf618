#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sdefit/models.hpp"

namespace sdefit {

enum class ExperimentKind { rate_fixed_T, rate_ergodic, clt_sigma, clt_drift_ergodic, consistency };
enum class GridKind { equidistant, log_spaced };
enum class PathSource { euler, exact_ou };

/// Pass/fail gates. Defaults are the documented acceptance thresholds.
struct Thresholds {
  std::optional<std::pair<double, double>> slope_band;  // per-kind default when empty
  double max_failure_fraction = 0.05;
  double clt_mean_abs = 0.1;
  std::pair<double, double> clt_variance{0.8, 1.25};
  /// KS gate is ks_factor * 1.63 / sqrt(replications).
  double ks_factor = 1.5;
  double covariance_rel_frobenius = 0.2;
  int allowed_inversions = 1;
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::rate_fixed_T;
  std::string model;
  std::vector<double> theta_true;
  double sigma_true = 0.0;
  double x0 = 0.0;
  double T = 1.0;
  /// clt_drift_ergodic only: horizons for the consistency sub-check (mesh T/n held fixed).
  std::vector<double> T_grid;
  std::vector<std::size_t> n_grid;
  std::size_t n_fine_ratio = 64;
  std::size_t replications = 100;
  std::uint64_t master_seed = 1;
  GridKind grid = GridKind::equidistant;
  double grid_spread = 10.0;
  PathSource path_source = PathSource::euler;
  std::optional<std::pair<std::vector<double>, std::vector<double>>> bounds;
  int multistart = 8;
  /// Start the continuous-time oracle at the densest-grid AMLE instead of a fresh multistart.
  bool cmle_warm_start = true;
  int cmle_multistart = 1;
  /// clt_sigma only: evaluate sigma-hat at the true drift parameter.
  bool drift_at_truth = false;
  int bootstrap = 1000;
  Thresholds thresholds;
};

struct Verdict {
  /// "pass", "fail" or "not_applicable".
  std::string status;
  std::optional<double> value;
  std::string threshold;
};

/// One estimate for one (replication, cell).
struct ReplicationRow {
  std::size_t rep = 0;
  std::size_t n = 0;
  double T = 0.0;
  double delta = 0.0;
  bool ok = false;
  std::string failure;
  std::vector<double> theta_hat;
  /// Continuous-time MLE for rate/consistency kinds, the true theta otherwise.
  std::vector<double> theta_ref;
  std::optional<double> sigma_hat;
  std::optional<double> error;
  bool multistart_disagreement = false;
};

struct CellSummary {
  std::size_t n = 0;
  double T = 0.0;
  double delta = 0.0;
  std::size_t successes = 0;
  std::size_t failures = 0;
  std::optional<double> median_error;
  std::optional<double> median_sigma_error;
  nlohmann::json extra = nlohmann::json::object();
};

struct McReport {
  ExperimentConfig config;
  std::vector<ReplicationRow> rows;
  std::vector<CellSummary> cells;
  nlohmann::json summary = nlohmann::json::object();
  std::map<std::string, Verdict> verdicts;
  nlohmann::json diagnostics = nlohmann::json::object();

  bool all_pass() const;
};

/// Paired design: every n subsamples the same fine path of one replication;
/// log(median |theta_n - theta_T|) is regressed on log(delta).
McReport rate_experiment(const ExperimentConfig& cfg, int threads = 1);
/// sqrt(n)(sigma_hat - sigma)/(sigma sqrt 2) across replications.
McReport clt_sigma_experiment(const ExperimentConfig& cfg, int threads = 1);
/// sqrt(T)(theta_hat - theta) against N(0, sigma I(theta)^{-1}).
McReport clt_drift_ergodic_experiment(const ExperimentConfig& cfg, int threads = 1);
/// Median errors decreasing along the n-grid.
McReport consistency_experiment(const ExperimentConfig& cfg, int threads = 1);
McReport run_experiment(const ExperimentConfig& cfg, int threads = 1);

/// Throws ConfigError (or DomainError for x0 outside E) on an invalid config.
void validate(const ExperimentConfig& cfg);
/// Resolves the model named in the config, applying any bounds override.
ModelPtr resolve_model(const ExperimentConfig& cfg);

std::string to_string(ExperimentKind k);
ExperimentKind parse_kind(const std::string& s);

/// Strict parse: unknown keys, wrong types and a missing `"schema": 1` are ConfigErrors.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& cfg);
nlohmann::json to_json(const McReport& report);
/// One row per (replication, cell); columns rep,n,T,delta,status,theta_hat_*,theta_ref_*,sigma_hat,error.
std::string rows_csv(const McReport& report);
/// One row per cell.
std::string cells_csv(const McReport& report);

}  // namespace sdefit
