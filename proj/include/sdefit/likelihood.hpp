#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sdefit/models.hpp"
#include "sdefit/simulate.hpp"

namespace sdefit {

/// Neumaier-compensated running sum; terms are added in call order.
class CompensatedSum {
 public:
  void add(double v) noexcept {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct CriterionEval {
  double value = 0.0;
  std::optional<Eigen::VectorXd> gradient;
  std::optional<Eigen::MatrixXd> hessian;
  std::size_t n_terms = 0;
};

/// Euler-discretized log-likelihood
///   L(theta, sigma) = -1/2 sum [ (dX - mu dt)^2 / (sigma b^2 dt) + log sigma ].
double approx_loglik(PathView path, const ModelSpec& model, const Eigen::VectorXd& theta,
                     double sigma);

/// Gradient of approx_loglik in (theta, sigma); the last entry is d/dsigma.
Eigen::VectorXd approx_loglik_gradient(PathView path, const ModelSpec& model,
                                       const Eigen::VectorXd& theta, double sigma);

/// Drift-only criterion sum mu/b^2 dX - 1/2 sum mu^2/b^2 dt, with optional
/// gradient and Hessian obtained by differentiating under the sum.
CriterionEval drift_loglik(PathView path, const ModelSpec& model, const Eigen::VectorXd& theta,
                           bool want_grad = false, bool want_hess = false);

/// sum dX^2 / (b^2 dt): the theta-free part of approx_loglik.
double quadratic_term(PathView path, const ModelSpec& model);

/// Closed-form maximizer in sigma at fixed theta: (1/n) sum (dX - mu dt)^2 / (b^2 dt).
double sigma_hat(PathView path, const ModelSpec& model, const Eigen::VectorXd& theta);

/// Continuous-time log-likelihood, realized as left-endpoint Ito sums on the fine grid.
CriterionEval cont_loglik(const FineGridPath& path, const ModelSpec& model,
                          const Eigen::VectorXd& theta, bool want_grad = false,
                          bool want_hess = false);

struct QuadraticVariationEstimate {
  double sigma = 0.0;
  /// (dyadic level k, ratio with 2^k increments), coarse to fine.
  std::vector<std::pair<int, double>> sweep;
};

/// Ratio of dyadic realized quadratic variation to the left-endpoint integral
/// of b^2(X_t) dt. n_fine must be a power of two; `levels` finest levels are
/// swept and the finest one is returned.
QuadraticVariationEstimate sigma_qv(const FineGridPath& path, const ModelSpec& model,
                                    int levels = 1);

}  // namespace sdefit
