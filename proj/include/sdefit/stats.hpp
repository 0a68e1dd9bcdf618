#pragma once

#include <span>
#include <vector>

namespace sdefit::stats {

double mean(std::span<const double> x);
/// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> x);
double median(std::vector<double> x);
/// Linear-interpolated empirical quantile, q in [0, 1].
double quantile(std::vector<double> x, double q);

double normal_cdf(double z);
/// sup_z |F_n(z) - Phi(z)|.
double ks_distance_normal(std::vector<double> x);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
};
/// Ordinary least squares y = intercept + slope x.
LineFit ols(std::span<const double> x, std::span<const double> y);

}  // namespace sdefit::stats
