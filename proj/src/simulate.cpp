#include "sdefit/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "sdefit/errors.hpp"
#include "sdefit/rng.hpp"

namespace sdefit {

ObservedPath::ObservedPath(std::vector<double> times, std::vector<double> states)
    : times_(std::move(times)), states_(std::move(states)) {
  if (times_.size() != states_.size()) {
    throw ConfigError("observed path: times and states differ in length");
  }
  if (times_.size() < 3) throw ConfigError("observed path: need at least two increments (n >= 2)");
  for (std::size_t i = 0; i + 1 < times_.size(); ++i) {
    const double dt = times_[i + 1] - times_[i];
    if (!(dt > 0)) {
      throw ConfigError("observed path: times not strictly increasing at index " +
                        std::to_string(i + 1));
    }
    delta_ = std::max(delta_, dt);
  }
  for (std::size_t i = 0; i < states_.size(); ++i) {
    if (!std::isfinite(states_[i]) || !std::isfinite(times_[i])) {
      throw ConfigError("observed path: non-finite value at index " + std::to_string(i));
    }
  }
}

namespace {

void check_inputs(const ModelSpec& model, const Eigen::VectorXd& theta, double sigma, double x0,
                  double T, std::size_t steps) {
  if (theta.size() != model.dim()) {
    throw DomainError("theta has " + std::to_string(theta.size()) + " coordinates, model '" +
                      model.name() + "' needs " + std::to_string(model.dim()));
  }
  if (!(sigma > 0)) throw DomainError("sigma must be positive");
  if (!(T > 0) || !std::isfinite(T)) throw DomainError("T must be positive");
  if (steps < 1) throw DomainError("need at least one simulation step");
  if (!model.domain().contains(x0)) {
    throw DomainError("x0 = " + std::to_string(x0) + " is outside the state domain " +
                      model.domain().describe() + " of model '" + model.name() + "'");
  }
}

}  // namespace

FineGridPath euler_path_from_increments(const ModelSpec& model, const Eigen::VectorXd& theta,
                                        double sigma, double x0, double T,
                                        std::vector<double> increments) {
  const std::size_t steps = increments.size();
  check_inputs(model, theta, sigma, x0, T, steps);

  FineGridPath path;
  path.model_name = model.name();
  path.theta_true.assign(theta.data(), theta.data() + theta.size());
  path.sigma_true = sigma;
  path.times.resize(steps + 1);
  path.states.resize(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    path.times[i] = T * static_cast<double>(i) / static_cast<double>(steps);
  }

  const double h = T / static_cast<double>(steps);
  const double vol = std::sqrt(sigma);
  const auto th = as_span(theta);
  const StateDomain dom = model.domain();

  path.states[0] = x0;
  if (model.positivity_transform()) {
    double y = std::log(x0);
    double x = x0;
    for (std::size_t i = 0; i < steps; ++i) {
      y += model.log_state_drift(x, th, sigma) * h + vol * (model.diff_shape(x) / x) * increments[i];
      x = std::exp(y);
      if (!(x > 0) || !std::isfinite(x)) throw StateEscapedDomain(i + 1, x);
      path.states[i + 1] = x;
    }
  } else {
    double x = x0;
    for (std::size_t i = 0; i < steps; ++i) {
      x += model.drift(x, th) * h + vol * model.diff_shape(x) * increments[i];
      if (!dom.contains(x) || !std::isfinite(x)) throw StateEscapedDomain(i + 1, x);
      path.states[i + 1] = x;
    }
  }
  path.wiener_increments = std::move(increments);
  return path;
}

FineGridPath euler_path(const ModelSpec& model, const Eigen::VectorXd& theta, double sigma,
                        double x0, double T, std::size_t n_fine, std::uint64_t seed,
                        std::uint64_t stream) {
  check_inputs(model, theta, sigma, x0, T, n_fine);
  std::vector<double> dw(n_fine);
  RandomStream(seed, stream).fill_normals(dw);
  const double root_h = std::sqrt(T / static_cast<double>(n_fine));
  for (double& w : dw) w *= root_h;
  FineGridPath path = euler_path_from_increments(model, theta, sigma, x0, T, std::move(dw));
  path.seed = seed;
  path.stream = stream;
  return path;
}

ObservedPath subsample(const FineGridPath& path, std::size_t n) {
  const std::size_t n_fine = path.n_fine();
  if (n == 0 || n_fine % n != 0) {
    throw IndicesNotSubgrid("n = " + std::to_string(n) + " does not divide n_fine = " +
                            std::to_string(n_fine));
  }
  const std::size_t stride = n_fine / n;
  std::vector<double> t(n + 1), x(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    t[k] = path.times[k * stride];
    x[k] = path.states[k * stride];
  }
  return ObservedPath(std::move(t), std::move(x));
}

ObservedPath subsample(const FineGridPath& path, std::span<const std::size_t> indices) {
  const std::size_t n_fine = path.n_fine();
  if (indices.size() < 2 || indices.front() != 0 || indices.back() != n_fine) {
    throw IndicesNotSubgrid("index list must start at 0 and end at n_fine = " +
                            std::to_string(n_fine));
  }
  std::vector<double> t, x;
  t.reserve(indices.size());
  x.reserve(indices.size());
  for (std::size_t k = 0; k < indices.size(); ++k) {
    if (indices[k] > n_fine || (k > 0 && indices[k] <= indices[k - 1])) {
      throw IndicesNotSubgrid("index list not strictly increasing within the fine grid at position " +
                              std::to_string(k));
    }
    t.push_back(path.times[indices[k]]);
    x.push_back(path.states[indices[k]]);
  }
  return ObservedPath(std::move(t), std::move(x));
}

std::vector<std::size_t> log_spaced_indices(std::size_t n_fine, std::size_t n, double spread) {
  if (n < 2 || n > n_fine) throw DomainError("log-spaced grid needs 2 <= n <= n_fine");
  if (!(spread >= 1.0)) throw DomainError("log-spaced grid spread must be >= 1");
  const double kappa = std::log(spread);
  std::vector<std::size_t> idx(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    const double u = static_cast<double>(k) / static_cast<double>(n);
    const double frac = kappa > 0 ? std::expm1(kappa * u) / std::expm1(kappa) : u;
    idx[k] = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n_fine)));
  }
  idx[0] = 0;
  idx[n] = n_fine;
  // Snap to a strictly increasing sequence that still ends at n_fine.
  for (std::size_t k = 1; k <= n; ++k) idx[k] = std::max(idx[k], idx[k - 1] + 1);
  for (std::size_t k = n; k-- > 0;) idx[k] = std::min(idx[k], idx[k + 1] - 1);
  idx[0] = 0;
  return idx;
}

ObservedPath exact_ou_path(const Eigen::Vector2d& theta, double sigma, double x0, double T,
                           std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  const double alpha = theta[0], beta = theta[1];
  if (!(beta > 0)) throw DomainError("exact OU transitions need beta > 0");
  if (!(sigma > 0)) throw DomainError("sigma must be positive");
  if (!(T > 0) || n < 2) throw DomainError("exact OU path needs T > 0 and n >= 2");
  const RandomStream rng(seed, stream);
  const double mean_level = alpha / beta;
  std::vector<double> t(n + 1), x(n + 1);
  x[0] = x0;
  for (std::size_t i = 0; i <= n; ++i) t[i] = T * static_cast<double>(i) / static_cast<double>(n);
  std::vector<double> z(n);
  rng.fill_normals(z);
  for (std::size_t i = 0; i < n; ++i) {
    const double dt = t[i + 1] - t[i];
    const double decay = std::exp(-beta * dt);
    const double var = sigma * (-std::expm1(-2.0 * beta * dt)) / (2.0 * beta);
    x[i + 1] = mean_level + (x[i] - mean_level) * decay + std::sqrt(var) * z[i];
  }
  return ObservedPath(std::move(t), std::move(x));
}

}  // namespace sdefit
