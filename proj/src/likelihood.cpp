#include "sdefit/likelihood.hpp"

#include <bit>
#include <cmath>

#include "sdefit/errors.hpp"

namespace sdefit {

namespace {

void validate(PathView path, const ModelSpec& model, const Eigen::VectorXd& theta) {
  if (path.times.size() != path.states.size() || path.times.size() < 2) {
    throw DomainError("path needs matching times/states with at least one increment");
  }
  if (theta.size() != model.dim()) {
    throw DomainError("theta has " + std::to_string(theta.size()) + " coordinates, model '" +
                      model.name() + "' needs " + std::to_string(model.dim()));
  }
  const StateDomain dom = model.domain();
  for (std::size_t i = 0; i < path.states.size(); ++i) {
    if (!dom.contains(path.states[i])) {
      throw DomainError("state at index " + std::to_string(i) + " lies outside " + dom.describe());
    }
  }
}

}  // namespace

double approx_loglik(PathView path, const ModelSpec& model, const Eigen::VectorXd& theta,
                     double sigma) {
  if (!(sigma > 0)) throw DomainError("sigma must be positive");
  validate(path, model, theta);
  const auto th = as_span(theta);
  const double log_sigma = std::log(sigma);
  CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < path.times.size(); ++i) {
    const double x = path.states[i];
    const double dt = path.times[i + 1] - path.times[i];
    const double b = model.diff_shape(x);
    const double r = (path.states[i + 1] - x) - model.drift(x, th) * dt;
    acc.add(-0.5 * (r * r / (sigma * b * b * dt) + log_sigma));
  }
  return acc.value();
}

Eigen::VectorXd approx_loglik_gradient(PathView path, const ModelSpec& model,
                                       const Eigen::VectorXd& theta, double sigma) {
  if (!(sigma > 0)) throw DomainError("sigma must be positive");
  validate(path, model, theta);
  const int d = model.dim();
  const auto th = as_span(theta);
  std::vector<double> g(static_cast<std::size_t>(d));
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(d) + 1);
  for (std::size_t i = 0; i + 1 < path.times.size(); ++i) {
    const double x = path.states[i];
    const double dt = path.times[i + 1] - path.times[i];
    const double b2 = model.diff_shape(x) * model.diff_shape(x);
    const double mu = model.drift_derivs(x, th, g, {});
    const double r = (path.states[i + 1] - x) - mu * dt;
    for (int j = 0; j < d; ++j) acc[j].add(r * g[j] / (sigma * b2));
    acc[d].add(0.5 * (r * r / (sigma * sigma * b2 * dt) - 1.0 / sigma));
  }
  Eigen::VectorXd out(d + 1);
  for (int j = 0; j <= d; ++j) out[j] = acc[j].value();
  return out;
}

CriterionEval drift_loglik(PathView path, const ModelSpec& model, const Eigen::VectorXd& theta,
                           bool want_grad, bool want_hess) {
  validate(path, model, theta);
  want_grad = want_grad || want_hess;
  const auto d = static_cast<std::size_t>(model.dim());
  const auto th = as_span(theta);
  std::vector<double> g(d), h(want_hess ? d * d : 0);
  CompensatedSum value;
  std::vector<CompensatedSum> grad(want_grad ? d : 0), hess(want_hess ? d * d : 0);

  const std::size_t n = path.times.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = path.states[i];
    const double dx = path.states[i + 1] - x;
    const double dt = path.times[i + 1] - path.times[i];
    const double b = model.diff_shape(x);
    const double inv_b2 = 1.0 / (b * b);
    if (!want_grad) {
      const double mu = model.drift(x, th);
      value.add((mu * dx - 0.5 * mu * mu * dt) * inv_b2);
      continue;
    }
    const double mu = model.drift_derivs(x, th, g, h);
    value.add((mu * dx - 0.5 * mu * mu * dt) * inv_b2);
    const double resid = dx - mu * dt;
    for (std::size_t j = 0; j < d; ++j) grad[j].add(g[j] * resid * inv_b2);
    if (want_hess) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j; k < d; ++k) {
          hess[j * d + k].add((h[j * d + k] * resid - g[j] * g[k] * dt) * inv_b2);
        }
      }
    }
  }

  CriterionEval out;
  out.value = value.value();
  out.n_terms = n;
  if (want_grad) {
    Eigen::VectorXd gv(static_cast<Eigen::Index>(d));
    for (std::size_t j = 0; j < d; ++j) gv[static_cast<Eigen::Index>(j)] = grad[j].value();
    out.gradient = std::move(gv);
  }
  if (want_hess) {
    const auto di = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd hm(di, di);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = j; k < d; ++k) {
        const double v = hess[j * d + k].value();
        hm(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = v;
        hm(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = v;
      }
    }
    out.hessian = std::move(hm);
  }
  return out;
}

double quadratic_term(PathView path, const ModelSpec& model) {
  CompensatedSum acc;
  for (std::size_t i = 0; i + 1 < path.times.size(); ++i) {
    const double x = path.states[i];
    const double dx = path.states[i + 1] - x;
    const double b = model.diff_shape(x);
    acc.add(dx * dx / (b * b * (path.times[i + 1] - path.times[i])));
  }
  return acc.value();
}

double sigma_hat(PathView path, const ModelSpec& model, const Eigen::VectorXd& theta) {
  validate(path, model, theta);
  const auto th = as_span(theta);
  CompensatedSum acc;
  const std::size_t n = path.times.size() - 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = path.states[i];
    const double dt = path.times[i + 1] - path.times[i];
    const double b = model.diff_shape(x);
    const double r = (path.states[i + 1] - x) - model.drift(x, th) * dt;
    acc.add(r * r / (b * b * dt));
  }
  return acc.value() / static_cast<double>(n);
}

CriterionEval cont_loglik(const FineGridPath& path, const ModelSpec& model,
                          const Eigen::VectorXd& theta, bool want_grad, bool want_hess) {
  return drift_loglik(path.view(), model, theta, want_grad, want_hess);
}

QuadraticVariationEstimate sigma_qv(const FineGridPath& path, const ModelSpec& model, int levels) {
  const std::size_t n_fine = path.n_fine();
  if (n_fine == 0 || !std::has_single_bit(n_fine)) {
    throw DomainError("sigma_qv needs n_fine to be a power of two, got " + std::to_string(n_fine));
  }
  const int finest = std::countr_zero(n_fine);
  if (levels < 1 || levels > finest + 1) {
    throw DomainError("sigma_qv: levels must be in [1, " + std::to_string(finest + 1) + "]");
  }
  const StateDomain dom = model.domain();
  CompensatedSum integral;
  for (std::size_t i = 0; i < n_fine; ++i) {
    if (!dom.contains(path.states[i])) {
      throw DomainError("state at index " + std::to_string(i) + " lies outside " + dom.describe());
    }
    const double b = model.diff_shape(path.states[i]);
    integral.add(b * b * (path.times[i + 1] - path.times[i]));
  }
  const double denom = integral.value();

  QuadraticVariationEstimate out;
  for (int level = finest - levels + 1; level <= finest; ++level) {
    const std::size_t stride = n_fine >> level;
    CompensatedSum qv;
    for (std::size_t j = stride; j <= n_fine; j += stride) {
      const double dx = path.states[j] - path.states[j - stride];
      qv.add(dx * dx);
    }
    out.sweep.emplace_back(level, qv.value() / denom);
  }
  out.sigma = out.sweep.back().second;
  return out;
}

}  // namespace sdefit
