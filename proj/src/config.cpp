#include <cmath>
#include <set>

#include "sdefit/errors.hpp"
#include "sdefit/mc_harness.hpp"
#include "sdefit/strict_json.hpp"

namespace sdefit {

namespace {

using nlohmann::json;

std::vector<double> number_array(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + ": expected an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ConfigError(what + ": expected an array of numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

std::vector<std::size_t> count_array(const json& v, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + ": expected an array of positive integers");
  std::vector<std::size_t> out;
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<std::int64_t>() <= 0) {
      throw ConfigError(what + ": expected an array of positive integers");
    }
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

std::pair<double, double> number_pair(const json& v, const std::string& what) {
  const auto a = number_array(v, what);
  if (a.size() != 2 || !(a[0] <= a[1])) throw ConfigError(what + ": expected [lo, hi] with lo <= hi");
  return {a[0], a[1]};
}

}  // namespace

std::string to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::rate_fixed_T: return "rate_fixed_T";
    case ExperimentKind::rate_ergodic: return "rate_ergodic";
    case ExperimentKind::clt_sigma: return "clt_sigma";
    case ExperimentKind::clt_drift_ergodic: return "clt_drift_ergodic";
    case ExperimentKind::consistency: return "consistency";
  }
  return "?";
}

ExperimentKind parse_kind(const std::string& s) {
  for (auto k : {ExperimentKind::rate_fixed_T, ExperimentKind::rate_ergodic, ExperimentKind::clt_sigma,
                 ExperimentKind::clt_drift_ergodic, ExperimentKind::consistency}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown experiment kind '" + s + "'");
}

ExperimentConfig parse_experiment_config(const json& j) {
  StrictObject o(j, "experiment config");
  if (o.get<int>("schema") != 1) throw ConfigError("experiment config: unsupported schema version");
  ExperimentConfig c;
  c.kind = parse_kind(o.get<std::string>("kind"));
  c.model = o.get<std::string>("model");
  c.theta_true = number_array(o.raw("theta_true"), "theta_true");
  c.sigma_true = o.get<double>("sigma_true");
  c.x0 = o.get<double>("x0");
  c.T = o.get<double>("T");
  if (o.has("T_grid")) c.T_grid = number_array(o.raw("T_grid"), "T_grid");
  c.n_grid = count_array(o.raw("n_grid"), "n_grid");
  c.n_fine_ratio = o.get_or<std::size_t>("n_fine_ratio", c.n_fine_ratio);
  c.replications = o.get<std::size_t>("replications");
  c.master_seed = o.get<std::uint64_t>("master_seed");
  if (o.has("grid")) {
    const auto g = o.get<std::string>("grid");
    if (g == "equidistant") c.grid = GridKind::equidistant;
    else if (g == "log_spaced") c.grid = GridKind::log_spaced;
    else throw ConfigError("experiment config: grid must be 'equidistant' or 'log_spaced'");
  }
  c.grid_spread = o.get_or<double>("grid_spread", c.grid_spread);
  if (o.has("path_source")) {
    const auto p = o.get<std::string>("path_source");
    if (p == "euler") c.path_source = PathSource::euler;
    else if (p == "exact_ou") c.path_source = PathSource::exact_ou;
    else throw ConfigError("experiment config: path_source must be 'euler' or 'exact_ou'");
  }
  if (o.has("bounds")) {
    StrictObject b(o.raw("bounds"), "bounds");
    c.bounds = std::make_pair(number_array(b.raw("lower"), "bounds.lower"),
                              number_array(b.raw("upper"), "bounds.upper"));
    b.reject_unknown();
  }
  c.multistart = o.get_or<int>("multistart", c.multistart);
  c.cmle_warm_start = o.get_or<bool>("cmle_warm_start", c.cmle_warm_start);
  c.cmle_multistart = o.get_or<int>("cmle_multistart", c.cmle_multistart);
  c.drift_at_truth = o.get_or<bool>("drift_at_truth", c.drift_at_truth);
  c.bootstrap = o.get_or<int>("bootstrap", c.bootstrap);
  if (o.has("thresholds")) {
    StrictObject t(o.raw("thresholds"), "thresholds");
    auto& th = c.thresholds;
    if (t.has("slope_band")) th.slope_band = number_pair(t.raw("slope_band"), "thresholds.slope_band");
    th.max_failure_fraction = t.get_or<double>("max_failure_fraction", th.max_failure_fraction);
    th.clt_mean_abs = t.get_or<double>("clt_mean_abs", th.clt_mean_abs);
    if (t.has("clt_variance")) th.clt_variance = number_pair(t.raw("clt_variance"), "thresholds.clt_variance");
    th.ks_factor = t.get_or<double>("ks_factor", th.ks_factor);
    th.covariance_rel_frobenius = t.get_or<double>("covariance_rel_frobenius", th.covariance_rel_frobenius);
    th.allowed_inversions = t.get_or<int>("allowed_inversions", th.allowed_inversions);
    t.reject_unknown();
  }
  o.reject_unknown();
  validate(c);
  return c;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["schema"] = 1;
  j["kind"] = to_string(c.kind);
  j["model"] = c.model;
  j["theta_true"] = c.theta_true;
  j["sigma_true"] = c.sigma_true;
  j["x0"] = c.x0;
  j["T"] = c.T;
  if (!c.T_grid.empty()) j["T_grid"] = c.T_grid;
  j["n_grid"] = c.n_grid;
  j["n_fine_ratio"] = c.n_fine_ratio;
  j["replications"] = c.replications;
  j["master_seed"] = c.master_seed;
  j["grid"] = c.grid == GridKind::equidistant ? "equidistant" : "log_spaced";
  j["grid_spread"] = c.grid_spread;
  j["path_source"] = c.path_source == PathSource::euler ? "euler" : "exact_ou";
  if (c.bounds) j["bounds"] = {{"lower", c.bounds->first}, {"upper", c.bounds->second}};
  j["multistart"] = c.multistart;
  j["cmle_warm_start"] = c.cmle_warm_start;
  j["cmle_multistart"] = c.cmle_multistart;
  j["drift_at_truth"] = c.drift_at_truth;
  j["bootstrap"] = c.bootstrap;
  json t;
  if (c.thresholds.slope_band) t["slope_band"] = {c.thresholds.slope_band->first, c.thresholds.slope_band->second};
  t["max_failure_fraction"] = c.thresholds.max_failure_fraction;
  t["clt_mean_abs"] = c.thresholds.clt_mean_abs;
  t["clt_variance"] = {c.thresholds.clt_variance.first, c.thresholds.clt_variance.second};
  t["ks_factor"] = c.thresholds.ks_factor;
  t["covariance_rel_frobenius"] = c.thresholds.covariance_rel_frobenius;
  t["allowed_inversions"] = c.thresholds.allowed_inversions;
  j["thresholds"] = t;
  return j;
}

ModelPtr resolve_model(const ExperimentConfig& c) {
  ModelPtr model = ModelRegistry::instance().create(c.model, c.sigma_true);
  if (c.bounds) {
    const auto& [lo, hi] = *c.bounds;
    model = with_param_space(model, ParameterSpace(Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
                                                   Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()))));
  }
  return model;
}

void validate(const ExperimentConfig& c) {
  if (!(c.sigma_true > 0) || !std::isfinite(c.sigma_true)) {
    throw ConfigError("experiment config: sigma_true must be positive");
  }
  if (!(c.T > 0) || !std::isfinite(c.T)) throw ConfigError("experiment config: T must be positive");
  if (c.n_grid.empty()) throw ConfigError("experiment config: n_grid must not be empty");
  for (std::size_t i = 1; i < c.n_grid.size(); ++i) {
    if (c.n_grid[i] <= c.n_grid[i - 1]) throw ConfigError("experiment config: n_grid must be strictly increasing");
  }
  if (c.n_grid.front() < 2) throw ConfigError("experiment config: every n must be >= 2");
  if (c.replications < 2) throw ConfigError("experiment config: need at least 2 replications");
  if (c.n_fine_ratio < 1) throw ConfigError("experiment config: n_fine_ratio must be >= 1");
  if (c.multistart < 1 || c.cmle_multistart < 1) throw ConfigError("experiment config: multistart must be >= 1");
  if (c.bootstrap < 0) throw ConfigError("experiment config: bootstrap must be >= 0");
  const std::size_t n_max = c.n_grid.back();
  if (c.grid == GridKind::equidistant) {
    for (auto n : c.n_grid) {
      if (n_max % n != 0) {
        throw ConfigError("experiment config: equidistant grids need every n to divide max(n_grid)");
      }
    }
  }
  if (c.grid == GridKind::log_spaced && c.kind != ExperimentKind::rate_fixed_T &&
      c.kind != ExperimentKind::consistency) {
    throw ConfigError("experiment config: log_spaced grids are only allowed for fixed-T kinds");
  }
  // rate_ergodic: T delta = T^2 / n decreases along the grid because T is fixed and n increases.
  for (double t : c.T_grid) {
    if (!(t > 0)) throw ConfigError("experiment config: T_grid entries must be positive");
  }
  for (std::size_t i = 1; i < c.T_grid.size(); ++i) {
    if (c.T_grid[i] <= c.T_grid[i - 1]) throw ConfigError("experiment config: T_grid must be strictly increasing");
  }
  if (c.path_source == PathSource::exact_ou) {
    if (c.model != "ou") throw ConfigError("experiment config: exact_ou path source needs model 'ou'");
    if (c.kind == ExperimentKind::rate_fixed_T || c.kind == ExperimentKind::rate_ergodic ||
        c.kind == ExperimentKind::consistency) {
      throw ConfigError("experiment config: rate and consistency kinds need Euler fine paths for the oracle");
    }
  }
  const ModelPtr model = resolve_model(c);
  if (static_cast<int>(c.theta_true.size()) != model->dim()) {
    throw ConfigError("experiment config: theta_true needs " + std::to_string(model->dim()) +
                      " coordinates for model '" + c.model + "'");
  }
  if (!model->domain().contains(c.x0)) {
    throw DomainError("experiment config: x0 outside the state domain " + model->domain().describe());
  }
  const Eigen::Map<const Eigen::VectorXd> theta(c.theta_true.data(), static_cast<Eigen::Index>(c.theta_true.size()));
  if (!model->param_space().contains(theta)) {
    throw ConfigError("experiment config: theta_true lies outside the parameter box");
  }
  if (c.kind == ExperimentKind::clt_drift_ergodic && !model->is_ergodic(c.theta_true, c.sigma_true)) {
    throw ConfigError("experiment config: clt_drift_ergodic needs an ergodic (theta, sigma)");
  }
  if (c.kind == ExperimentKind::clt_drift_ergodic && c.grid != GridKind::equidistant) {
    throw ConfigError("experiment config: the ergodic drift CLT uses equidistant grids only");
  }
}

}  // namespace sdefit
