#include <gtest/gtest.h>

#include <cmath>

#include "sdefit/errors.hpp"
#include "sdefit/estimate.hpp"
#include "sdefit/likelihood.hpp"
#include "sdefit/models.hpp"
#include "sdefit/simulate.hpp"

using namespace sdefit;

namespace {

/// Normal equations of the OU drift criterion, solved independently.
Eigen::Vector2d ou_closed_form(const ObservedPath& p) {
  double s1 = 0, sx = 0, sxx = 0, sdx = 0, sxdx = 0;
  for (std::size_t i = 0; i + 1 < p.times().size(); ++i) {
    const double dt = p.times()[i + 1] - p.times()[i], x = p.states()[i];
    const double dx = p.states()[i + 1] - x;
    s1 += dt;
    sx += x * dt;
    sxx += x * x * dt;
    sdx += dx;
    sxdx += x * dx;
  }
  // maximize a sdx - b sxdx - 1/2 (a^2 s1 - 2ab sx + b^2 sxx)
  Eigen::Matrix2d a;
  a << s1, -sx, -sx, sxx;
  return a.lu().solve(Eigen::Vector2d(sdx, -sxdx));
}

}  // namespace

TEST(Amle, ConstantDriftClosedForm) {
  const auto m = constant_drift();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = euler_path(*m, Eigen::VectorXd::Constant(1, 0.7), 1.3, 0.5, 3.0, 600, seed);
    const auto obs = subsample(p, 200);
    const auto r = amle(obs, *m);
    ASSERT_TRUE(r.converged);
    EXPECT_NEAR(r.theta_hat[0], (obs.states().back() - obs.states().front()) / 3.0, 1e-8);
  }
}

TEST(Amle, OuMatchesNormalEquationsWithinThreeIterations) {
  const auto m = builtin_ou(ParameterSpace(Eigen::Vector2d(-50, -50), Eigen::Vector2d(50, 50)));
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto p = euler_path(*m, Eigen::Vector2d(1, 1), 1.0, 0.0, 1.0, 1024, seed);
    const ObservedPath obs = subsample(p, 1024);
    const auto r = amle(obs, *m);
    ASSERT_TRUE(r.converged);
    const Eigen::Vector2d ref = ou_closed_form(obs);
    EXPECT_NEAR(r.theta_hat[0], ref[0], 1e-8 * (1 + std::abs(ref[0])));
    EXPECT_NEAR(r.theta_hat[1], ref[1], 1e-8 * (1 + std::abs(ref[1])));
    EXPECT_LE(r.iterations, 3);
    EXPECT_NEAR(*r.sigma_hat, sigma_hat(obs.view(), *m, r.theta_hat), 1e-15);
  }
}

TEST(Amle, StationaryAtOptimum) {
  const auto m = builtin_logistic(LogisticBounds{.sigma_ref = 0.2, .alpha_hi = 1000, .beta_hi = 1000, .gamma_hi = 50});
  const auto p = euler_path(*m, Eigen::Vector3d(1.1, 1.0, 1.0), 0.2, 0.01, 20.0, 4096, 3);
  const auto r = amle(subsample(p, 1024), *m);
  ASSERT_TRUE(r.converged);
  EXPECT_TRUE(r.hessian_negdef);
  const auto e = drift_loglik(subsample(p, 1024).view(), *m, r.theta_hat, true);
  EXPECT_LE(e.gradient->cwiseAbs().maxCoeff(), 1e-8 * (1 + std::abs(e.value)));
  EXPECT_NEAR(r.gradient_norm, e.gradient->cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Amle, ResultIndependentOfThreads) {
  const auto m = builtin_logistic(LogisticBounds{.sigma_ref = 0.2, .alpha_hi = 1000, .beta_hi = 1000, .gamma_hi = 50});
  const auto p = euler_path(*m, Eigen::Vector3d(1.1, 1.0, 1.0), 0.2, 0.01, 20.0, 2048, 4);
  const auto obs = subsample(p, 2048);
  OptimOptions one, many;
  one.multistart = many.multistart = 12;
  many.threads = 4;
  const auto a = amle(obs, *m, one), b = amle(obs, *m, many);
  EXPECT_EQ(a.theta_hat, b.theta_hat);
  EXPECT_EQ(a.sigma_hat, b.sigma_hat);
  EXPECT_EQ(a.selected_start, b.selected_start);
  EXPECT_EQ(a.multistart_agreement, b.multistart_agreement);
}

TEST(Amle, Theta0IsUsedAsFirstStart) {
  const auto m = builtin_ou();
  const auto p = euler_path(*m, Eigen::Vector2d(1, 1), 1.0, 0.0, 10.0, 2000, 2);
  OptimOptions o;
  o.multistart = 1;
  o.theta0 = Eigen::Vector2d(1.0, 1.0);
  const auto r = amle(subsample(p, 2000), *m, o);
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.selected_start, 0);
  EXPECT_EQ(r.multistart_count, 1);
}

TEST(Amle, AllStartsOnBoundaryThrows) {
  const auto g = builtin_gbm(ParameterSpace(Eigen::VectorXd::Constant(1, -10), Eigen::VectorXd::Constant(1, -9)));
  const auto p = euler_path(*builtin_gbm(), Eigen::VectorXd::Constant(1, 0.5), 0.1, 1.0, 5.0, 1000, 1);
  EXPECT_THROW(amle(subsample(p, 1000), *g), NoInteriorMaximum);
}

TEST(Cmle, KeepsSigmaFixed) {
  const auto m = builtin_ou();
  const auto p = euler_path(*m, Eigen::Vector2d(1, 1), 1.0, 0.0, 10.0, 4096, 6);
  const auto r = cmle(p, *m);
  EXPECT_TRUE(r.converged);
  EXPECT_FALSE(r.sigma_hat.has_value());
  EXPECT_NEAR(r.theta_hat[1], ou_closed_form(subsample(p, 4096))[1], 1e-8);
}

TEST(Fisher, OuAnalytic) {
  const auto m = builtin_ou();
  const Eigen::Vector2d th(1.5, 2.0);
  const double sigma = 0.8, mean = th[0] / th[1];
  Eigen::Matrix2d expect;
  expect << 1, -mean, -mean, mean * mean + sigma / (2 * th[1]);
  const auto q = fisher_info(*m, th, sigma);
  EXPECT_EQ(q.method, FisherMethod::quadrature);
  EXPECT_LT((q.matrix - expect).norm(), 1e-10);
  ErgodicAverageOptions avg;
  avg.T = 4000;
  const auto e = fisher_info(*m, th, sigma, FisherMethod::ergodic_average, avg);
  EXPECT_LT((e.matrix - expect).norm() / expect.norm(), 0.05);
  EXPECT_EQ(to_string(FisherMethod::ergodic_average), "ergodic_average");
}

TEST(Fisher, LogisticQuadratureMatchesTrapezoid) {
  const auto m = builtin_logistic();
  const Eigen::Vector3d th(1.2, 0.8, 1.5);
  const double sigma = 0.4;
  const auto q = fisher_info(*m, th, sigma);
  Eigen::Matrix3d ref = Eigen::Matrix3d::Zero();
  const int n = 400000;
  const double a = 1e-9, b = 40.0, h = (b - a) / n;
  for (int i = 0; i <= n; ++i) {
    const double x = a + i * h, w = (i == 0 || i == n) ? 0.5 : 1.0;
    const double xg = std::pow(x, th[2]);
    const Eigen::Vector3d v(1.0, -xg, -th[1] * xg * std::log(x));
    ref += w * h * *m->stationary_density(x, std::vector<double>(th.data(), th.data() + 3), sigma) * v * v.transpose();
  }
  EXPECT_LT((q.matrix - ref).norm() / ref.norm(), 1e-6);
  EXPECT_LT((q.matrix - q.matrix.transpose()).norm(), 1e-14);
}

TEST(Fisher, NonErgodicThrows) {
  EXPECT_THROW(fisher_info(*builtin_gbm(), Eigen::VectorXd::Constant(1, 0.1), 1.0), NotErgodic);
  EXPECT_THROW(fisher_info(*builtin_ou(), Eigen::Vector2d(0, -1), 1.0), NotErgodic);
}

TEST(StdError, OuWaldCoverage) {
  const auto m = builtin_ou();
  const Eigen::Vector2d th(1.0, 1.0);
  int covered_a = 0, covered_b = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    const auto p = exact_ou_path(th, 1.0, 1.0, 50.0, 5000, 17, r);
    OptimOptions o;
    o.want_stderr = true;
    o.multistart = 2;
    const auto e = amle(p, *m, o);
    ASSERT_TRUE(e.std_error.has_value());
    covered_a += std::abs(e.theta_hat[0] - th[0]) <= 1.96 * (*e.std_error)[0];
    covered_b += std::abs(e.theta_hat[1] - th[1]) <= 1.96 * (*e.std_error)[1];
  }
  EXPECT_GE(covered_a, 0.88 * reps);
  EXPECT_LE(covered_a, 0.99 * reps);
  EXPECT_GE(covered_b, 0.88 * reps);
  EXPECT_LE(covered_b, 0.99 * reps);
}

TEST(StdError, AbsentForNonErgodicModels) {
  const auto g = builtin_gbm();
  const auto p = euler_path(*g, Eigen::VectorXd::Constant(1, 0.3), 0.2, 1.0, 2.0, 500, 1);
  OptimOptions o;
  o.want_stderr = true;
  const auto r = amle(subsample(p, 500), *g, o);
  EXPECT_FALSE(r.std_error.has_value());
}
