#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "sdefit/models.hpp"
#include "sdefit/optimize.hpp"
#include "sdefit/simulate.hpp"

namespace sdefit {

struct OptimOptions {
  int multistart = 8;
  NewtonOptions newton;
  /// Box shrink applied before optimizing, as a fraction of the box width.
  double box_margin = 1e-6;
  /// Seed of the Latin hypercube of starting points.
  std::uint64_t seed = 0;
  /// Replaces the first Latin-hypercube start when set.
  std::optional<Eigen::VectorXd> theta0;
  /// Overrides the model's parameter box.
  std::optional<ParameterSpace> bounds;
  /// Attach Fisher-information standard errors (ergodic models only).
  bool want_stderr = false;
  /// Parallel multistarts; the result does not depend on this.
  int threads = 1;
};

struct EstimateResult {
  Eigen::VectorXd theta_hat;
  /// Absent for the continuous-time oracle, which keeps sigma fixed.
  std::optional<double> sigma_hat;
  double criterion_value = 0.0;
  double gradient_norm = 0.0;
  bool hessian_negdef = false;
  int iterations = 0;
  bool converged = false;
  int multistart_count = 0;
  /// Converged starts that ended within 1e-6 (relative) of the selected maximizer.
  int multistart_agreement = 0;
  int selected_start = -1;
  std::optional<Eigen::VectorXd> std_error;
  std::string note;
};

/// Approximate MLE: maximizes the drift criterion over the box from a
/// multistart, then plugs the maximizer into the closed-form sigma estimate.
EstimateResult amle(const ObservedPath& path, const ModelSpec& model, const OptimOptions& opts = {});
EstimateResult amle(PathView path, const ModelSpec& model, const OptimOptions& opts = {});

/// Continuous-time MLE oracle maximizing the fine-grid log-likelihood.
EstimateResult cmle(const FineGridPath& path, const ModelSpec& model, const OptimOptions& opts = {});

enum class FisherMethod { quadrature, ergodic_average };

struct FisherInfo {
  Eigen::MatrixXd matrix;
  FisherMethod method = FisherMethod::quadrature;
  Eigen::VectorXd theta;
  double sigma = 0.0;
};

struct ErgodicAverageOptions {
  double T = 1e4;
  double dt = 0.01;
  /// Defaults to the stationary mean when the model has a density, else required.
  std::optional<double> x0;
  std::uint64_t seed = 0x5eed;
};

/// Fisher information int (D mu)^T (D mu) / b^2 d pi_theta, either by quadrature
/// against the stationary density or as a long simulated time average.
FisherInfo fisher_info(const ModelSpec& model, const Eigen::VectorXd& theta, double sigma,
                       FisherMethod method = FisherMethod::quadrature,
                       const ErgodicAverageOptions& avg = {});

/// Integral of f against the stationary density over the state domain.
double stationary_expectation(const ModelSpec& model, const Eigen::VectorXd& theta, double sigma,
                              const std::function<double(double)>& f);

std::string to_string(FisherMethod m);

}  // namespace sdefit
