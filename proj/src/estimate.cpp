#include "sdefit/estimate.hpp"

#include <cmath>
#include <vector>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/sinh_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "sdefit/errors.hpp"
#include "sdefit/likelihood.hpp"
#include "sdefit/parallel.hpp"

namespace sdefit {

namespace {

Objective drift_objective(PathView path, const ModelSpec& model) {
  Objective obj;
  obj.value = [path, &model](const Eigen::VectorXd& th) {
    return drift_loglik(path, model, th).value;
  };
  obj.derivs = [path, &model](const Eigen::VectorXd& th, Eigen::VectorXd& g, Eigen::MatrixXd& h) {
    CriterionEval e = drift_loglik(path, model, th, true, true);
    g = *e.gradient;
    h = *e.hessian;
    return e.value;
  };
  return obj;
}

bool converged(const LocalMaximum& m) { return m.stationary && m.hessian_negdef && !m.boundary_hit; }

EstimateResult maximize(const Objective& obj, const ModelSpec& model, const OptimOptions& opts) {
  if (opts.multistart < 1) throw ConfigError("multistart must be >= 1");
  const ParameterSpace& space = opts.bounds ? *opts.bounds : model.param_space();
  if (space.dim() != model.dim()) {
    throw ConfigError("bounds have " + std::to_string(space.dim()) + " coordinates, model '" +
                      model.name() + "' needs " + std::to_string(model.dim()));
  }
  const ParameterSpace box = space.shrunk(opts.box_margin);
  std::vector<Eigen::VectorXd> starts = latin_hypercube(box, opts.multistart, opts.seed);
  if (opts.theta0) {
    if (opts.theta0->size() != model.dim()) {
      throw ConfigError("theta0 needs " + std::to_string(model.dim()) + " coordinates");
    }
    starts[0] = *opts.theta0;
  }

  std::vector<LocalMaximum> runs(starts.size());
  parallel_for(starts.size(), opts.threads,
               [&](std::size_t i) { runs[i] = projected_newton(obj, box, starts[i], opts.newton); });

  auto better = [](const LocalMaximum& a, const LocalMaximum& b) {
    const double tie = 1e-12 * (1.0 + std::max(std::abs(a.value), std::abs(b.value)));
    if (std::abs(a.value - b.value) > tie) return a.value > b.value;
    return a.gradient.cwiseAbs().maxCoeff() < b.gradient.cwiseAbs().maxCoeff();
  };

  int best = -1;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!converged(runs[i])) continue;
    if (best < 0 || better(runs[i], runs[static_cast<std::size_t>(best)])) best = static_cast<int>(i);
  }
  EstimateResult res;
  res.multistart_count = static_cast<int>(runs.size());
  if (best < 0) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (runs[i].boundary_hit) continue;
      if (best < 0 || better(runs[i], runs[static_cast<std::size_t>(best)])) best = static_cast<int>(i);
    }
    if (best < 0) {
      throw NoInteriorMaximum("every one of " + std::to_string(runs.size()) +
                              " optimizer starts ended on the boundary of the parameter box");
    }
    res.note = "NotConverged";
  }

  const LocalMaximum& sel = runs[static_cast<std::size_t>(best)];
  res.theta_hat = sel.theta;
  res.criterion_value = sel.value;
  res.gradient_norm = sel.gradient.cwiseAbs().maxCoeff();
  res.hessian_negdef = sel.hessian_negdef;
  res.iterations = sel.iterations;
  res.converged = converged(sel);
  res.selected_start = best;
  const double scale = 1.0 + sel.theta.cwiseAbs().maxCoeff();
  for (const auto& r : runs) {
    if (converged(r) && (r.theta - sel.theta).cwiseAbs().maxCoeff() <= 1e-6 * scale) {
      ++res.multistart_agreement;
    }
  }
  bool any_boundary = false;
  for (const auto& r : runs) any_boundary = any_boundary || r.boundary_hit;
  if (any_boundary && res.note.empty()) res.note = "BoundaryHit";
  return res;
}

}  // namespace

EstimateResult amle(PathView path, const ModelSpec& model, const OptimOptions& opts) {
  EstimateResult res = maximize(drift_objective(path, model), model, opts);
  res.sigma_hat = sigma_hat(path, model, res.theta_hat);
  if (opts.want_stderr && model.has_stationary_density() &&
      model.is_ergodic(as_span(res.theta_hat), *res.sigma_hat)) {
    const FisherInfo fi = fisher_info(model, res.theta_hat, *res.sigma_hat);
    const double horizon = path.times.back() - path.times.front();
    const Eigen::MatrixXd cov = *res.sigma_hat * fi.matrix.inverse() / horizon;
    res.std_error = cov.diagonal().cwiseSqrt();
  }
  return res;
}

EstimateResult amle(const ObservedPath& path, const ModelSpec& model, const OptimOptions& opts) {
  return amle(path.view(), model, opts);
}

EstimateResult cmle(const FineGridPath& path, const ModelSpec& model, const OptimOptions& opts) {
  return maximize(drift_objective(path.view(), model), model, opts);
}

std::string to_string(FisherMethod m) {
  return m == FisherMethod::quadrature ? "quadrature" : "ergodic_average";
}

double stationary_expectation(const ModelSpec& model, const Eigen::VectorXd& theta, double sigma,
                              const std::function<double(double)>& f) {
  const auto th = as_span(theta);
  if (!model.has_stationary_density()) {
    throw DomainError("model '" + model.name() + "' has no closed-form stationary density");
  }
  auto integrand = [&](double x) {
    const double p = model.stationary_density(x, th, sigma).value_or(0.0);
    return p == 0.0 ? 0.0 : f(x) * p;
  };
  const StateDomain dom = model.domain();
  const double tol = 1e-12;
  if (std::isinf(dom.lo) && std::isinf(dom.hi)) {
    boost::math::quadrature::sinh_sinh<double> q;
    return q.integrate(integrand, tol);
  }
  if (std::isinf(dom.hi)) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate([&](double u) { return integrand(dom.lo + u); }, 0.0,
                       std::numeric_limits<double>::infinity(), tol);
  }
  if (std::isinf(dom.lo)) {
    boost::math::quadrature::exp_sinh<double> q;
    return q.integrate([&](double u) { return integrand(dom.hi - u); }, 0.0,
                       std::numeric_limits<double>::infinity(), tol);
  }
  boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(integrand, dom.lo, dom.hi, tol);
}

FisherInfo fisher_info(const ModelSpec& model, const Eigen::VectorXd& theta, double sigma,
                       FisherMethod method, const ErgodicAverageOptions& avg) {
  const auto th = as_span(theta);
  if (theta.size() != model.dim()) throw DomainError("theta dimension does not match the model");
  if (!model.is_ergodic(th, sigma)) {
    throw NotErgodic("model '" + model.name() + "' is not ergodic at the given (theta, sigma)");
  }
  const int d = model.dim();
  FisherInfo out;
  out.method = method;
  out.theta = theta;
  out.sigma = sigma;
  out.matrix = Eigen::MatrixXd::Zero(d, d);

  if (method == FisherMethod::quadrature) {
    for (int j = 0; j < d; ++j) {
      for (int k = j; k < d; ++k) {
        const double v = stationary_expectation(model, theta, sigma, [&](double x) {
          std::vector<double> g(static_cast<std::size_t>(d));
          model.drift_grad(x, th, g);
          const double b = model.diff_shape(x);
          return g[static_cast<std::size_t>(j)] * g[static_cast<std::size_t>(k)] / (b * b);
        });
        out.matrix(j, k) = out.matrix(k, j) = v;
      }
    }
    return out;
  }

  if (!(avg.T > 0) || !(avg.dt > 0)) throw DomainError("ergodic average needs T > 0 and dt > 0");
  double x0;
  if (avg.x0) {
    x0 = *avg.x0;
  } else if (model.has_stationary_density()) {
    x0 = stationary_expectation(model, theta, sigma, [](double x) { return x; });
  } else {
    throw DomainError("ergodic average for model '" + model.name() + "' needs an explicit x0");
  }
  const auto steps = static_cast<std::size_t>(std::llround(avg.T / avg.dt));
  const FineGridPath path = euler_path(model, theta, sigma, x0, avg.T, steps, avg.seed);
  std::vector<double> g(static_cast<std::size_t>(d));
  std::vector<CompensatedSum> acc(static_cast<std::size_t>(d * d));
  for (std::size_t i = 0; i < steps; ++i) {
    const double x = path.states[i];
    const double dt = path.times[i + 1] - path.times[i];
    const double b = model.diff_shape(x);
    model.drift_grad(x, th, g);
    for (int j = 0; j < d; ++j) {
      for (int k = j; k < d; ++k) {
        acc[static_cast<std::size_t>(j * d + k)].add(g[static_cast<std::size_t>(j)] *
                                                     g[static_cast<std::size_t>(k)] / (b * b) * dt);
      }
    }
  }
  for (int j = 0; j < d; ++j) {
    for (int k = j; k < d; ++k) {
      out.matrix(j, k) = out.matrix(k, j) = acc[static_cast<std::size_t>(j * d + k)].value() / avg.T;
    }
  }
  return out;
}

}  // namespace sdefit
