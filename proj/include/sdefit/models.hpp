#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace sdefit {

/// Open box lower < theta < upper (componentwise).
class ParameterSpace {
 public:
  ParameterSpace(Eigen::VectorXd lower, Eigen::VectorXd upper);

  int dim() const noexcept { return static_cast<int>(lower_.size()); }
  const Eigen::VectorXd& lower() const noexcept { return lower_; }
  const Eigen::VectorXd& upper() const noexcept { return upper_; }
  bool contains(const Eigen::VectorXd& theta) const;
  /// The box shrunk inwards by `fraction` of its width in every coordinate.
  ParameterSpace shrunk(double fraction) const;

 private:
  Eigen::VectorXd lower_;
  Eigen::VectorXd upper_;
};

/// Open state interval E = (lo, hi); endpoints may be infinite.
struct StateDomain {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double x) const noexcept { return x > lo && x < hi; }
  std::string describe() const;
};

/// Scalar diffusion family dX = mu(X, theta) dt + sqrt(sigma) b(X) dW.
///
/// Implementations are immutable; every member is safe to call concurrently.
/// Parameter vectors are passed as spans so that per-observation evaluation
/// in the likelihood loops does not allocate.
class ModelSpec {
 public:
  virtual ~ModelSpec() = default;

  virtual std::string name() const = 0;
  virtual StateDomain domain() const = 0;
  virtual const ParameterSpace& param_space() const = 0;
  int dim() const { return param_space().dim(); }

  virtual double drift(double x, std::span<const double> theta) const = 0;
  virtual void drift_grad(double x, std::span<const double> theta, std::span<double> grad) const = 0;
  /// Row-major d x d.
  virtual void drift_hess(double x, std::span<const double> theta, std::span<double> hess) const = 0;
  virtual double diff_shape(double x) const = 0;
  virtual double diff_shape_d1(double x) const = 0;

  /// Value, gradient and (if non-empty) Hessian of the drift in one call.
  virtual double drift_derivs(double x, std::span<const double> theta, std::span<double> grad,
                              std::span<double> hess) const;

  /// Simulate in Y = log X so that states stay in (0, inf).
  virtual bool positivity_transform() const { return false; }
  /// Ito drift of log X: mu/x - sigma b^2 / (2 x^2).
  virtual double log_state_drift(double x, std::span<const double> theta, double sigma) const;

  /// Whether (theta, sigma) lies in the ergodic region of the model.
  virtual bool is_ergodic(std::span<const double> theta, double sigma) const;
  /// Invariant density pi_theta(x); empty when no closed form is known.
  virtual std::optional<double> stationary_density(double x, std::span<const double> theta,
                                                   double sigma) const;
  virtual bool has_stationary_density() const { return false; }
};

using ModelPtr = std::shared_ptr<const ModelSpec>;

struct LogisticBounds {
  /// Lower alpha bound is sigma_ref / 2 + alpha_margin.
  double sigma_ref = 0.0;
  double alpha_margin = 0.05;
  double alpha_hi = 10.0;
  double beta_lo = 1e-3;
  double beta_hi = 10.0;
  double gamma_lo = 0.05;
  double gamma_hi = 5.0;
};

/// mu = (alpha - beta x^gamma) x, b(x) = x on (0, inf); theta = (alpha, beta, gamma).
ModelPtr builtin_logistic(const LogisticBounds& bounds = {});
/// mu = alpha - beta x, b = 1 on R; theta = (alpha, beta).
ModelPtr builtin_ou(std::optional<ParameterSpace> space = std::nullopt);
/// mu = alpha x, b(x) = x on (0, inf); theta = (alpha).
ModelPtr builtin_gbm(std::optional<ParameterSpace> space = std::nullopt);
/// mu = c, b = 1 on R; theta = (c). Closed-form maximizer, used as an oracle.
ModelPtr constant_drift(std::optional<ParameterSpace> space = std::nullopt);

/// E[(X^gamma)^p] under the stationary law of the logistic model, where
/// X^gamma ~ Gamma(shape A = 2(alpha - sigma/2)/(gamma sigma),
///                 scale B = gamma sigma / (2 beta)),
/// i.e. B^p Gamma(A + p) / Gamma(A). Throws NotErgodic if alpha <= sigma/2.
///
/// Note: the closed-form second moment sometimes quoted as AB(B + 1) differs
/// from the Gamma-law value AB^2(A + 1) unless A = B; this function follows the
/// Gamma law.
double logistic_stationary_moments(std::span<const double> theta, double sigma, int p);

/// Name-based lookup used by the CLI: "logistic", "ou", "gbm", "constant",
/// plus anything added through register_model.
class ModelRegistry {
 public:
  using Factory = ModelPtr (*)(double sigma_ref);

  static ModelRegistry& instance();
  void register_model(const std::string& name, Factory factory);
  /// sigma_ref only affects models whose default box depends on sigma.
  ModelPtr create(const std::string& name, double sigma_ref = 0.0) const;
  std::vector<std::string> names() const;

 private:
  ModelRegistry();
  std::vector<std::pair<std::string, Factory>> factories_;
};

/// Returns a model identical to `base` except for its parameter box.
ModelPtr with_param_space(ModelPtr base, ParameterSpace space);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace sdefit
