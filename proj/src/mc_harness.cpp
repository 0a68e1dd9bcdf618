#include "sdefit/mc_harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "sdefit/errors.hpp"
#include "sdefit/estimate.hpp"
#include "sdefit/likelihood.hpp"
#include "sdefit/parallel.hpp"
#include "sdefit/rng.hpp"
#include "sdefit/simulate.hpp"
#include "sdefit/stats.hpp"

namespace sdefit {

using nlohmann::json;

bool McReport::all_pass() const {
  for (const auto& [name, v] : verdicts) {
    if (v.status == "fail") return false;
  }
  return true;
}

namespace {

constexpr std::uint64_t kBootstrapStream = 0xB0075742A9000000ull;
constexpr std::uint64_t kHorizonStreamStride = 1ull << 40;

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Verdict make_verdict(bool pass, double value, std::string threshold) {
  return {pass ? "pass" : "fail", value, std::move(threshold)};
}

Verdict not_applicable(std::string why) { return {"not_applicable", std::nullopt, std::move(why)}; }

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

/// Truth path for one replication; `stream` separates replications.
FineGridPath truth_path(const ExperimentConfig& cfg, const ModelSpec& model, double T,
                        std::size_t n_fine, std::uint64_t stream) {
  const Eigen::VectorXd theta = to_vector(cfg.theta_true);
  if (cfg.path_source == PathSource::exact_ou) {
    const ObservedPath p = exact_ou_path(Eigen::Vector2d(theta[0], theta[1]), cfg.sigma_true, cfg.x0,
                                         T, n_fine, cfg.master_seed, stream);
    FineGridPath f;
    f.times = p.times();
    f.states = p.states();
    f.model_name = model.name();
    f.theta_true = cfg.theta_true;
    f.sigma_true = cfg.sigma_true;
    f.seed = cfg.master_seed;
    f.stream = stream;
    return f;
  }
  return euler_path(model, theta, cfg.sigma_true, cfg.x0, T, n_fine, cfg.master_seed, stream);
}

ObservedPath observe(const ExperimentConfig& cfg, const FineGridPath& path, std::size_t n) {
  if (cfg.grid == GridKind::log_spaced) {
    const auto idx = log_spaced_indices(path.n_fine(), n, cfg.grid_spread);
    return subsample(path, idx);
  }
  return subsample(path, n);
}

OptimOptions amle_options(const ExperimentConfig& cfg, std::uint64_t stream, std::size_t cell) {
  OptimOptions o;
  o.multistart = cfg.multistart;
  o.seed = splitmix64(cfg.master_seed ^ splitmix64(stream * 1315423911ull + cell));
  return o;
}

double norm2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// All cells of one paired replication: AMLE on every subsample and the
/// continuous-time MLE on the fine path itself.
std::vector<ReplicationRow> paired_replication(const ExperimentConfig& cfg, const ModelSpec& model,
                                               std::size_t rep) {
  const std::size_t n_max = cfg.n_grid.back();
  const FineGridPath path = truth_path(cfg, model, cfg.T, n_max * cfg.n_fine_ratio, rep);
  std::vector<ReplicationRow> rows(cfg.n_grid.size());
  std::optional<EstimateResult> densest;
  for (std::size_t c = 0; c < cfg.n_grid.size(); ++c) {
    ReplicationRow& row = rows[c];
    row.rep = rep;
    row.n = cfg.n_grid[c];
    row.T = cfg.T;
    try {
      const ObservedPath obs = observe(cfg, path, row.n);
      row.delta = obs.delta();
      const EstimateResult r = amle(obs, model, amle_options(cfg, rep, c));
      row.theta_hat = to_std(r.theta_hat);
      row.sigma_hat = r.sigma_hat;
      row.multistart_disagreement = r.multistart_agreement < r.multistart_count;
      row.ok = r.converged;
      if (!r.converged) row.failure = "amle: " + r.note;
      if (r.converged && c + 1 == cfg.n_grid.size()) densest = r;
    } catch (const Error& e) {
      row.failure = std::string("amle: ") + e.what();
    }
  }

  OptimOptions copts = amle_options(cfg, rep, cfg.n_grid.size());
  if (cfg.cmle_warm_start && densest) {
    copts.theta0 = densest->theta_hat;
    copts.multistart = cfg.cmle_multistart;
  }
  std::string cmle_failure;
  std::vector<double> theta_T;
  try {
    const EstimateResult r = cmle(path, model, copts);
    if (r.converged) theta_T = to_std(r.theta_hat);
    else cmle_failure = "cmle: " + r.note;
  } catch (const Error& e) {
    cmle_failure = std::string("cmle: ") + e.what();
  }
  for (auto& row : rows) {
    if (!cmle_failure.empty()) {
      row.ok = false;
      row.failure = row.failure.empty() ? cmle_failure : row.failure + "; " + cmle_failure;
      continue;
    }
    row.theta_ref = theta_T;
    if (!row.theta_hat.empty()) row.error = norm2(row.theta_hat, theta_T);
  }
  return rows;
}

template <class Fn>
std::vector<ReplicationRow> run_replications(const ExperimentConfig& cfg, int threads, Fn&& one) {
  std::vector<std::vector<ReplicationRow>> per_rep(cfg.replications);
  parallel_for(cfg.replications, threads, [&](std::size_t r) { per_rep[r] = one(r); });
  std::vector<ReplicationRow> rows;
  for (auto& v : per_rep) {
    for (auto& row : v) rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CellSummary> summarize_cells(const ExperimentConfig& cfg,
                                         const std::vector<ReplicationRow>& rows) {
  std::vector<CellSummary> cells;
  auto find_cell = [&](std::size_t n, double T) -> CellSummary& {
    for (auto& c : cells) {
      if (c.n == n && c.T == T) return c;
    }
    cells.push_back(CellSummary{});
    cells.back().n = n;
    cells.back().T = T;
    return cells.back();
  };
  std::map<std::pair<std::size_t, double>, std::pair<std::vector<double>, std::vector<double>>> errs;
  for (const auto& row : rows) {
    CellSummary& c = find_cell(row.n, row.T);
    c.delta = std::max(c.delta, row.delta);
    if (row.ok) {
      ++c.successes;
      auto& e = errs[{row.n, row.T}];
      if (row.error) e.first.push_back(*row.error);
      if (row.sigma_hat) e.second.push_back(std::abs(*row.sigma_hat - cfg.sigma_true));
    } else {
      ++c.failures;
    }
  }
  for (auto& c : cells) {
    auto& e = errs[{c.n, c.T}];
    if (!e.first.empty()) c.median_error = stats::median(e.first);
    if (!e.second.empty()) c.median_sigma_error = stats::median(e.second);
  }
  return cells;
}

void failure_verdict(McReport& rep) {
  double worst = 0.0;
  for (const auto& c : rep.cells) {
    const double total = static_cast<double>(c.successes + c.failures);
    if (total > 0) worst = std::max(worst, static_cast<double>(c.failures) / total);
  }
  const double limit = rep.config.thresholds.max_failure_fraction;
  rep.verdicts["cell_failure_rate"] = make_verdict(worst <= limit, worst, "<= " + fmt(limit));
}

void disagreement_diagnostic(McReport& rep) {
  std::size_t ok = 0, disagree = 0;
  for (const auto& row : rep.rows) {
    if (row.theta_hat.empty()) continue;
    ++ok;
    if (row.multistart_disagreement) ++disagree;
  }
  rep.diagnostics["multistart_disagreement_rate"] =
      ok ? static_cast<double>(disagree) / static_cast<double>(ok) : 0.0;
}

std::optional<double> slope_of(const std::vector<double>& log_delta,
                               const std::vector<std::vector<double>>& errors_by_cell,
                               const std::vector<std::size_t>& pick) {
  std::vector<double> y;
  for (const auto& cell : errors_by_cell) {
    std::vector<double> sample;
    for (auto r : pick) {
      if (!std::isnan(cell[r])) sample.push_back(cell[r]);
    }
    if (sample.empty()) return std::nullopt;
    const double med = stats::median(sample);
    if (!(med > 0)) return std::nullopt;
    y.push_back(std::log(med));
  }
  return stats::ols(log_delta, y).slope;
}

int count_inversions(const std::vector<std::optional<double>>& medians) {
  int inv = 0;
  for (std::size_t k = 1; k < medians.size(); ++k) {
    if (!medians[k] || !medians[k - 1] || *medians[k] >= *medians[k - 1]) ++inv;
  }
  return inv;
}

double z_gate_ks(const ExperimentConfig& cfg, std::size_t count) {
  return cfg.thresholds.ks_factor * 1.63 / std::sqrt(static_cast<double>(count));
}

/// mean / variance / KS gates on a standardized sample; names are prefix + "_mean" etc.
void clt_gates(McReport& rep, const std::string& prefix, const std::vector<double>& z, json& stats_out) {
  const auto& th = rep.config.thresholds;
  if (z.size() < 2) {
    rep.verdicts[prefix + "_mean"] = not_applicable("fewer than two successful replications");
    return;
  }
  const double m = stats::mean(z), v = stats::variance(z), ks = stats::ks_distance_normal(z);
  stats_out = {{"mean", m}, {"variance", v}, {"ks", ks}, {"count", z.size()}};
  rep.verdicts[prefix + "_mean"] = make_verdict(std::abs(m) <= th.clt_mean_abs, m, "|mean| <= " + fmt(th.clt_mean_abs));
  rep.verdicts[prefix + "_variance"] =
      make_verdict(v >= th.clt_variance.first && v <= th.clt_variance.second, v,
                   "in [" + fmt(th.clt_variance.first) + ", " + fmt(th.clt_variance.second) + "]");
  const double ks_gate = z_gate_ks(rep.config, z.size());
  rep.verdicts[prefix + "_ks"] = make_verdict(ks <= ks_gate, ks, "<= " + fmt(ks_gate));
}

McReport start_report(const ExperimentConfig& cfg) {
  validate(cfg);
  McReport rep;
  rep.config = cfg;
  return rep;
}

}  // namespace

McReport rate_experiment(const ExperimentConfig& cfg, int threads) {
  if (cfg.kind != ExperimentKind::rate_fixed_T && cfg.kind != ExperimentKind::rate_ergodic) {
    throw ConfigError("rate_experiment needs kind rate_fixed_T or rate_ergodic");
  }
  McReport rep = start_report(cfg);
  const ModelPtr model = resolve_model(cfg);
  rep.rows = run_replications(cfg, threads, [&](std::size_t r) { return paired_replication(cfg, *model, r); });
  rep.cells = summarize_cells(cfg, rep.rows);
  failure_verdict(rep);
  disagreement_diagnostic(rep);

  const auto band = cfg.thresholds.slope_band.value_or(
      cfg.kind == ExperimentKind::rate_fixed_T ? std::make_pair(0.35, 0.65) : std::make_pair(0.3, 0.7));
  const std::string band_text = "in [" + fmt(band.first) + ", " + fmt(band.second) + "]";

  if (cfg.n_grid.size() < 4) {
    rep.summary["slope"] = nullptr;
    rep.verdicts["slope_in_band"] = not_applicable("rate regression needs >= 4 grid points");
    return rep;
  }

  // errors[cell][rep], NaN for failed replications.
  const std::size_t C = cfg.n_grid.size(), R = cfg.replications;
  std::vector<std::vector<double>> errors(C, std::vector<double>(R, std::numeric_limits<double>::quiet_NaN()));
  double scale = 1.0;
  for (const auto& row : rep.rows) {
    const std::size_t c = static_cast<std::size_t>(
        std::find(cfg.n_grid.begin(), cfg.n_grid.end(), row.n) - cfg.n_grid.begin());
    if (row.ok && row.error) errors[c][row.rep] = *row.error;
    for (double v : row.theta_ref) scale = std::max(scale, 1.0 + std::abs(v));
  }
  std::vector<double> log_delta;
  bool degenerate = true;
  for (const auto& c : rep.cells) {
    log_delta.push_back(std::log(c.delta));
    if (!c.median_error || *c.median_error > 1e-10 * scale) degenerate = false;
  }
  if (degenerate) {
    rep.summary["slope"] = nullptr;
    rep.summary["degenerate"] = true;
    rep.verdicts["slope_in_band"] =
        not_applicable("errors vanish identically across the grid; slope undefined");
    return rep;
  }

  std::vector<std::size_t> all(R);
  for (std::size_t r = 0; r < R; ++r) all[r] = r;
  const auto slope = slope_of(log_delta, errors, all);
  if (!slope) {
    rep.summary["slope"] = nullptr;
    rep.verdicts["slope_in_band"] = {"fail", std::nullopt, band_text + " (a cell has no usable median)"};
    return rep;
  }

  const RandomStream rng(cfg.master_seed, kBootstrapStream);
  std::vector<double> boot;
  std::uint64_t draw = 0;
  std::vector<std::size_t> pick(R);
  for (int b = 0; b < cfg.bootstrap; ++b) {
    for (auto& p : pick) p = static_cast<std::size_t>(rng.below(draw++, R));
    if (auto s = slope_of(log_delta, errors, pick)) boot.push_back(*s);
  }
  rep.summary["slope"] = *slope;
  if (!boot.empty()) {
    rep.summary["slope_ci"] = {stats::quantile(boot, 0.025), stats::quantile(boot, 0.975)};
  }
  rep.summary["bootstrap_resamples"] = boot.size();
  rep.summary["grid_points"] = C;
  rep.verdicts["slope_in_band"] =
      make_verdict(*slope >= band.first && *slope <= band.second, *slope, band_text);
  return rep;
}

McReport consistency_experiment(const ExperimentConfig& cfg, int threads) {
  if (cfg.kind != ExperimentKind::consistency) throw ConfigError("consistency_experiment needs kind consistency");
  McReport rep = start_report(cfg);
  const ModelPtr model = resolve_model(cfg);
  rep.rows = run_replications(cfg, threads, [&](std::size_t r) { return paired_replication(cfg, *model, r); });
  rep.cells = summarize_cells(cfg, rep.rows);
  failure_verdict(rep);
  disagreement_diagnostic(rep);
  if (cfg.n_grid.size() < 2) {
    rep.verdicts["theta_error_trend"] = not_applicable("n-grid has a single point");
    rep.verdicts["sigma_error_trend"] = not_applicable("n-grid has a single point");
    return rep;
  }
  std::vector<std::optional<double>> theta_med, sigma_med;
  for (const auto& c : rep.cells) {
    theta_med.push_back(c.median_error);
    sigma_med.push_back(c.median_sigma_error);
  }
  const int allowed = cfg.thresholds.allowed_inversions;
  const std::string text = "inversions <= " + std::to_string(allowed);
  const int ti = count_inversions(theta_med), si = count_inversions(sigma_med);
  rep.verdicts["theta_error_trend"] = make_verdict(ti <= allowed, ti, text);
  rep.verdicts["sigma_error_trend"] = make_verdict(si <= allowed, si, text);
  return rep;
}

McReport clt_sigma_experiment(const ExperimentConfig& cfg, int threads) {
  if (cfg.kind != ExperimentKind::clt_sigma) throw ConfigError("clt_sigma_experiment needs kind clt_sigma");
  McReport rep = start_report(cfg);
  const ModelPtr model = resolve_model(cfg);
  const Eigen::VectorXd theta = to_vector(cfg.theta_true);
  const std::size_t n_max = cfg.n_grid.back();

  rep.rows = run_replications(cfg, threads, [&](std::size_t r) {
    const FineGridPath path = truth_path(cfg, *model, cfg.T, n_max * cfg.n_fine_ratio, r);
    std::vector<ReplicationRow> rows(cfg.n_grid.size());
    for (std::size_t c = 0; c < cfg.n_grid.size(); ++c) {
      ReplicationRow& row = rows[c];
      row.rep = r;
      row.n = cfg.n_grid[c];
      row.T = cfg.T;
      row.theta_ref = cfg.theta_true;
      try {
        const ObservedPath obs = observe(cfg, path, row.n);
        row.delta = obs.delta();
        if (cfg.drift_at_truth) {
          row.theta_hat = cfg.theta_true;
          row.sigma_hat = sigma_hat(obs.view(), *model, theta);
          row.ok = true;
        } else {
          const EstimateResult e = amle(obs, *model, amle_options(cfg, r, c));
          row.theta_hat = to_std(e.theta_hat);
          row.sigma_hat = e.sigma_hat;
          row.multistart_disagreement = e.multistart_agreement < e.multistart_count;
          row.ok = e.converged;
          if (!e.converged) row.failure = "amle: " + e.note;
        }
        row.error = norm2(row.theta_hat, cfg.theta_true);
      } catch (const Error& e) {
        row.failure = std::string("amle: ") + e.what();
      }
    }
    return rows;
  });
  rep.cells = summarize_cells(cfg, rep.rows);
  failure_verdict(rep);
  disagreement_diagnostic(rep);

  for (auto& cell : rep.cells) {
    std::vector<double> z;
    for (const auto& row : rep.rows) {
      if (row.n != cell.n || !row.ok || !row.sigma_hat) continue;
      z.push_back(std::sqrt(static_cast<double>(row.n)) * (*row.sigma_hat - cfg.sigma_true) /
                  (cfg.sigma_true * std::sqrt(2.0)));
    }
    if (z.size() >= 2) {
      cell.extra = {{"z_mean", stats::mean(z)}, {"z_variance", stats::variance(z)},
                    {"z_ks", stats::ks_distance_normal(z)}};
    }
    if (cell.n == n_max) {
      json s;
      clt_gates(rep, "z", z, s);
      rep.summary["standardized_sigma"] = s;
    }
  }
  return rep;
}

McReport clt_drift_ergodic_experiment(const ExperimentConfig& cfg, int threads) {
  if (cfg.kind != ExperimentKind::clt_drift_ergodic) {
    throw ConfigError("clt_drift_ergodic_experiment needs kind clt_drift_ergodic");
  }
  McReport rep = start_report(cfg);
  const ModelPtr model = resolve_model(cfg);
  const Eigen::VectorXd theta = to_vector(cfg.theta_true);
  const int d = model->dim();
  const std::size_t n_max = cfg.n_grid.back();

  auto run_horizon = [&](double T, const std::vector<std::size_t>& grid, std::uint64_t stream_base) {
    ExperimentConfig local = cfg;
    local.T = T;
    local.n_grid = grid;
    return run_replications(local, threads, [&](std::size_t r) {
      const std::uint64_t stream = stream_base + r;
      const FineGridPath path = truth_path(local, *model, T, grid.back() * cfg.n_fine_ratio, stream);
      std::vector<ReplicationRow> rows(grid.size());
      for (std::size_t c = 0; c < grid.size(); ++c) {
        ReplicationRow& row = rows[c];
        row.rep = r;
        row.n = grid[c];
        row.T = T;
        row.theta_ref = cfg.theta_true;
        try {
          const ObservedPath obs = subsample(path, row.n);
          row.delta = obs.delta();
          const EstimateResult e = amle(obs, *model, amle_options(cfg, stream, c));
          row.theta_hat = to_std(e.theta_hat);
          row.sigma_hat = e.sigma_hat;
          row.multistart_disagreement = e.multistart_agreement < e.multistart_count;
          row.ok = e.converged;
          if (!e.converged) row.failure = "amle: " + e.note;
          row.error = norm2(row.theta_hat, cfg.theta_true);
        } catch (const Error& e) {
          row.failure = std::string("amle: ") + e.what();
        }
      }
      return rows;
    });
  };

  rep.rows = run_horizon(cfg.T, cfg.n_grid, 0);

  const FisherInfo fi = fisher_info(*model, theta, cfg.sigma_true);
  const Eigen::MatrixXd target = cfg.sigma_true * fi.matrix.inverse();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fi.matrix);
  const Eigen::MatrixXd info_sqrt = es.operatorSqrt();

  std::vector<Eigen::VectorXd> scaled;
  for (const auto& row : rep.rows) {
    if (row.n != n_max || !row.ok) continue;
    scaled.push_back(std::sqrt(cfg.T) * (to_vector(row.theta_hat) - theta));
  }
  json& summary = rep.summary;
  summary["fisher_information"] = json::array();
  for (int i = 0; i < d; ++i) {
    json r = json::array();
    for (int j = 0; j < d; ++j) r.push_back(fi.matrix(i, j));
    summary["fisher_information"].push_back(r);
  }

  if (scaled.size() >= 2) {
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
    for (const auto& s : scaled) mean += s;
    mean /= static_cast<double>(scaled.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
    for (const auto& s : scaled) cov += (s - mean) * (s - mean).transpose();
    cov /= static_cast<double>(scaled.size() - 1);
    const double rel = (cov - target).norm() / target.norm();
    summary["sample_covariance"] = json::array();
    summary["efficient_covariance"] = json::array();
    for (int i = 0; i < d; ++i) {
      json a = json::array(), b = json::array();
      for (int j = 0; j < d; ++j) {
        a.push_back(cov(i, j));
        b.push_back(target(i, j));
      }
      summary["sample_covariance"].push_back(a);
      summary["efficient_covariance"].push_back(b);
    }
    const double tol = cfg.thresholds.covariance_rel_frobenius;
    rep.verdicts["covariance_rel_frobenius"] = make_verdict(rel <= tol, rel, "<= " + fmt(tol));

    rep.diagnostics["whitened_drift"] = json::array();
    for (int i = 0; i < d; ++i) {
      std::vector<double> z;
      for (const auto& s : scaled) z.push_back((info_sqrt * s)[i] / std::sqrt(cfg.sigma_true));
      rep.diagnostics["whitened_drift"].push_back(
          {{"mean", stats::mean(z)}, {"variance", stats::variance(z)}, {"ks", stats::ks_distance_normal(z)}});
    }
  } else {
    rep.verdicts["covariance_rel_frobenius"] = not_applicable("fewer than two successful replications");
  }

  if (!cfg.T_grid.empty()) {
    std::vector<std::optional<double>> medians;
    json trend = json::array();
    for (std::size_t k = 0; k < cfg.T_grid.size(); ++k) {
      const double Tk = cfg.T_grid[k];
      const auto nk = std::max<std::size_t>(
          2, static_cast<std::size_t>(std::llround(static_cast<double>(n_max) * Tk / cfg.T)));
      const auto rows = run_horizon(Tk, {nk}, (k + 1) * kHorizonStreamStride);
      std::vector<double> errs;
      for (const auto& row : rows) {
        if (row.ok && row.error) errs.push_back(*row.error);
      }
      medians.push_back(errs.empty() ? std::nullopt : std::optional<double>(stats::median(errs)));
      trend.push_back({{"T", Tk}, {"n", nk}, {"median_error", medians.back() ? json(*medians.back()) : json(nullptr)}});
      for (const auto& row : rows) rep.rows.push_back(row);
    }
    summary["consistency_T_trend"] = trend;
    const int inv = count_inversions(medians);
    rep.verdicts["consistency_T_trend"] = make_verdict(inv == 0, inv, "median error strictly decreasing in T");
  }

  rep.cells = summarize_cells(cfg, rep.rows);
  failure_verdict(rep);
  disagreement_diagnostic(rep);
  return rep;
}

McReport run_experiment(const ExperimentConfig& cfg, int threads) {
  switch (cfg.kind) {
    case ExperimentKind::rate_fixed_T:
    case ExperimentKind::rate_ergodic: return rate_experiment(cfg, threads);
    case ExperimentKind::clt_sigma: return clt_sigma_experiment(cfg, threads);
    case ExperimentKind::clt_drift_ergodic: return clt_drift_ergodic_experiment(cfg, threads);
    case ExperimentKind::consistency: return consistency_experiment(cfg, threads);
  }
  throw ConfigError("unknown experiment kind");
}

namespace {

json opt_num(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

json to_json(const McReport& r) {
  json j;
  j["schema"] = 1;
  j["kind"] = to_string(r.config.kind);
  j["config"] = to_json(r.config);
  j["cells"] = json::array();
  for (const auto& c : r.cells) {
    j["cells"].push_back({{"n", c.n},
                          {"T", c.T},
                          {"delta", c.delta},
                          {"successes", c.successes},
                          {"failures", c.failures},
                          {"median_error", opt_num(c.median_error)},
                          {"median_sigma_error", opt_num(c.median_sigma_error)},
                          {"extra", c.extra}});
  }
  j["summary"] = r.summary;
  j["verdicts"] = json::object();
  for (const auto& [name, v] : r.verdicts) {
    j["verdicts"][name] = {{"status", v.status}, {"value", opt_num(v.value)}, {"threshold", v.threshold}};
  }
  j["all_pass"] = r.all_pass();
  j["diagnostics"] = r.diagnostics;
  j["rows"] = json::array();
  for (const auto& row : r.rows) {
    j["rows"].push_back({{"rep", row.rep},
                         {"n", row.n},
                         {"T", row.T},
                         {"delta", row.delta},
                         {"ok", row.ok},
                         {"failure", row.failure},
                         {"theta_hat", row.theta_hat},
                         {"theta_ref", row.theta_ref},
                         {"sigma_hat", opt_num(row.sigma_hat)},
                         {"error", opt_num(row.error)}});
  }
  return j;
}

std::string rows_csv(const McReport& r) {
  const std::size_t d = r.config.theta_true.size();
  std::string out = "rep,n,T,delta,status";
  for (std::size_t i = 0; i < d; ++i) out += ",theta_hat_" + std::to_string(i);
  for (std::size_t i = 0; i < d; ++i) out += ",theta_ref_" + std::to_string(i);
  out += ",sigma_hat,error\n";
  for (const auto& row : r.rows) {
    out += std::to_string(row.rep) + "," + std::to_string(row.n) + "," + csv_num(row.T) + "," +
           csv_num(row.delta) + "," + (row.ok ? "ok" : "failed");
    for (std::size_t i = 0; i < d; ++i) out += "," + (i < row.theta_hat.size() ? csv_num(row.theta_hat[i]) : "");
    for (std::size_t i = 0; i < d; ++i) out += "," + (i < row.theta_ref.size() ? csv_num(row.theta_ref[i]) : "");
    out += "," + (row.sigma_hat ? csv_num(*row.sigma_hat) : "");
    out += "," + (row.error ? csv_num(*row.error) : "");
    out += "\n";
  }
  return out;
}

std::string cells_csv(const McReport& r) {
  std::string out = "n,T,delta,successes,failures,median_error,median_sigma_error\n";
  for (const auto& c : r.cells) {
    out += std::to_string(c.n) + "," + csv_num(c.T) + "," + csv_num(c.delta) + "," +
           std::to_string(c.successes) + "," + std::to_string(c.failures) + "," +
           (c.median_error ? csv_num(*c.median_error) : "") + "," +
           (c.median_sigma_error ? csv_num(*c.median_sigma_error) : "") + "\n";
  }
  return out;
}

}  // namespace sdefit
