#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sdefit/errors.hpp"
#include "sdefit/stats.hpp"

using namespace sdefit;

TEST(Stats, MeanVarianceMedian) {
  const std::vector<double> x{4, 1, 3, 2};
  EXPECT_DOUBLE_EQ(stats::mean(x), 2.5);
  EXPECT_DOUBLE_EQ(stats::variance(x), 5.0 / 3.0);
  EXPECT_DOUBLE_EQ(stats::median(x), 2.5);
  EXPECT_DOUBLE_EQ(stats::median({5, 1, 3}), 3.0);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 1.0), 4.0);
  EXPECT_DOUBLE_EQ(stats::quantile(x, 1.0 / 3.0), 2.0);
  EXPECT_THROW(stats::mean(std::vector<double>{}), DomainError);
  EXPECT_THROW(stats::variance(std::vector<double>{1.0}), DomainError);
}

TEST(Stats, NormalCdf) {
  EXPECT_DOUBLE_EQ(stats::normal_cdf(0.0), 0.5);
  EXPECT_NEAR(stats::normal_cdf(1.959963984540054), 0.975, 1e-15);
  EXPECT_NEAR(stats::normal_cdf(-1.0), 0.15865525393145707, 1e-15);
}

TEST(Stats, KsDistance) {
  // A single point at 0: the empirical CDF jumps from 0 to 1 where Phi = 1/2.
  EXPECT_DOUBLE_EQ(stats::ks_distance_normal({0.0}), 0.5);
  // Points at the quantiles (i + 1/2)/n give the minimal distance 1/(2n).
  std::vector<double> q;
  const int n = 50;
  for (int i = 0; i < n; ++i) {
    const double p = (i + 0.5) / n;
    double lo = -10, hi = 10;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (stats::normal_cdf(mid) < p ? lo : hi) = mid;
    }
    q.push_back(0.5 * (lo + hi));
  }
  EXPECT_NEAR(stats::ks_distance_normal(q), 0.5 / n, 1e-12);
}

TEST(Stats, OlsExactLine) {
  const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  const auto f = stats::ols(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-15);
  EXPECT_NEAR(f.intercept, 1.0, 1e-15);
  EXPECT_THROW(stats::ols(std::vector<double>{1, 1}, std::vector<double>{0, 1}), DomainError);
}
