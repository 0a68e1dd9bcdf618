#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sdefit/models.hpp"

namespace sdefit {

/// Non-owning view of a sampled path; what the likelihood routines consume.
struct PathView {
  std::span<const double> times;
  std::span<const double> states;

  std::size_t intervals() const noexcept { return times.empty() ? 0 : times.size() - 1; }
};

/// Simulation truth on an equidistant fine grid, with the Brownian increments used.
struct FineGridPath {
  std::vector<double> times;
  std::vector<double> states;
  std::vector<double> wiener_increments;
  std::string model_name;
  std::vector<double> theta_true;
  double sigma_true = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  std::size_t n_fine() const noexcept { return times.size() - 1; }
  double horizon() const noexcept { return times.back(); }
  PathView view() const noexcept { return {times, states}; }
};

/// Discrete observations 0 = t_0 < ... < t_n = T used by the estimators.
class ObservedPath {
 public:
  /// Validates strictly increasing times, equal lengths and n >= 2.
  ObservedPath(std::vector<double> times, std::vector<double> states);

  const std::vector<double>& times() const noexcept { return times_; }
  const std::vector<double>& states() const noexcept { return states_; }
  std::size_t n() const noexcept { return times_.size() - 1; }
  /// Maximal mesh max_i (t_{i+1} - t_i).
  double delta() const noexcept { return delta_; }
  double horizon() const noexcept { return times_.back() - times_.front(); }
  PathView view() const noexcept { return {times_, states_}; }

 private:
  std::vector<double> times_;
  std::vector<double> states_;
  double delta_ = 0.0;
};

/// Euler-Maruyama on an equidistant grid of n_fine steps over [0, T].
/// Increments are draw k = 0..n_fine-1 of RandomStream(seed, stream), scaled by sqrt(T/n_fine).
FineGridPath euler_path(const ModelSpec& model, const Eigen::VectorXd& theta, double sigma,
                        double x0, double T, std::size_t n_fine, std::uint64_t seed,
                        std::uint64_t stream = 0);

/// Same recursion driven by caller-supplied Brownian increments (one per step).
FineGridPath euler_path_from_increments(const ModelSpec& model, const Eigen::VectorXd& theta,
                                        double sigma, double x0, double T,
                                        std::vector<double> increments);

/// Equidistant subsample with n intervals; n must divide n_fine.
ObservedPath subsample(const FineGridPath& path, std::size_t n);
/// Subsample at explicit fine-grid indices (first 0, last n_fine, strictly increasing).
ObservedPath subsample(const FineGridPath& path, std::span<const std::size_t> indices);

/// n intervals on a fine grid of n_fine steps with geometrically growing
/// spacing (last/first spacing approximately `spread`), snapped to grid points.
std::vector<std::size_t> log_spaced_indices(std::size_t n_fine, std::size_t n, double spread = 10.0);

/// Exact Gaussian transitions of the OU model mu = alpha - beta x, b = 1.
ObservedPath exact_ou_path(const Eigen::Vector2d& theta, double sigma, double x0, double T,
                           std::size_t n, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace sdefit
