#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "sdefit/errors.hpp"
#include "sdefit/models.hpp"
#include "sdefit/rng.hpp"
#include "support.hpp"

using namespace sdefit;
using sdefit::testing::fd_gradient;
using sdefit::testing::fd_jacobian;
using sdefit::testing::rel_err;

namespace {

struct Case {
  ModelPtr model;
  double x_lo, x_hi;
};

std::vector<Case> all_models() {
  return {{builtin_logistic(), 0.05, 4.0}, {builtin_ou(), -3.0, 3.0}, {builtin_gbm(), 0.05, 5.0},
          {constant_drift(), -3.0, 3.0}};
}

Eigen::VectorXd interior_point(const ParameterSpace& box, const RandomStream& rng, std::uint64_t k) {
  // Probe the middle 60% of each coordinate; logistic upper bounds are far from typical values.
  Eigen::VectorXd th(box.dim());
  for (int i = 0; i < box.dim(); ++i) {
    const double lo = box.lower()[i], hi = std::min(box.upper()[i], box.lower()[i] + 4.0);
    th[i] = lo + (0.2 + 0.6 * rng.uniform(k * 8 + i)) * (hi - lo);
  }
  return th;
}

/// Trapezoid rule on a uniform grid.
double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int i = 1; i < n; ++i) s += f(a + i * h);
  return s * h;
}

}  // namespace

TEST(Models, DriftGradientMatchesFiniteDifferences) {
  const RandomStream rng(11, 0);
  for (const auto& c : all_models()) {
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Eigen::VectorXd th = interior_point(c.model->param_space(), rng, k);
      const double x = c.x_lo + rng.uniform(1000 + k) * (c.x_hi - c.x_lo);
      Eigen::VectorXd g(th.size());
      c.model->drift_grad(x, as_span(th), {g.data(), static_cast<std::size_t>(g.size())});
      const auto f = [&](const Eigen::VectorXd& t) { return c.model->drift(x, as_span(t)); };
      EXPECT_LT(rel_err(g, fd_gradient(f, th)), 1e-6) << c.model->name() << " probe " << k;
    }
  }
}

TEST(Models, DriftHessianMatchesFiniteDifferences) {
  const RandomStream rng(12, 0);
  for (const auto& c : all_models()) {
    const int d = c.model->dim();
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Eigen::VectorXd th = interior_point(c.model->param_space(), rng, k);
      const double x = c.x_lo + rng.uniform(1000 + k) * (c.x_hi - c.x_lo);
      Eigen::MatrixXd h(d, d);
      std::vector<double> hv(d * d);
      c.model->drift_hess(x, as_span(th), hv);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) h(i, j) = hv[i * d + j];
      const auto grad = [&](const Eigen::VectorXd& t) {
        Eigen::VectorXd g(d);
        c.model->drift_grad(x, as_span(t), {g.data(), static_cast<std::size_t>(d)});
        return g;
      };
      EXPECT_LT(rel_err(h, fd_jacobian(grad, th)), 1e-4) << c.model->name() << " probe " << k;
      EXPECT_LT((h - h.transpose()).norm(), 1e-14 * (1 + h.norm()));
    }
  }
}

TEST(Models, DriftDerivsAgreesWithSeparateCalls) {
  const RandomStream rng(13, 0);
  for (const auto& c : all_models()) {
    const int d = c.model->dim();
    const Eigen::VectorXd th = interior_point(c.model->param_space(), rng, 0);
    const double x = 0.5 * (c.x_lo + c.x_hi);
    std::vector<double> g1(d), g2(d), h1(d * d), h2(d * d);
    const double v = c.model->drift_derivs(x, as_span(th), g1, h1);
    c.model->drift_grad(x, as_span(th), g2);
    c.model->drift_hess(x, as_span(th), h2);
    EXPECT_DOUBLE_EQ(v, c.model->drift(x, as_span(th)));
    for (int i = 0; i < d; ++i) EXPECT_NEAR(g1[i], g2[i], 1e-14 * (1 + std::abs(g2[i])));
    for (int i = 0; i < d * d; ++i) EXPECT_NEAR(h1[i], h2[i], 1e-14 * (1 + std::abs(h2[i])));
    std::vector<double> g3(d);
    EXPECT_DOUBLE_EQ(c.model->drift_derivs(x, as_span(th), g3, {}), v);
  }
}

TEST(Models, DiffusionShapeDerivativeAndSign) {
  for (const auto& c : all_models()) {
    const auto& m = *c.model;
    const double x = 0.3 * c.x_lo + 0.7 * c.x_hi, h = 1e-6;
    EXPECT_NEAR(m.diff_shape_d1(x), (m.diff_shape(x + h) - m.diff_shape(x - h)) / (2 * h), 1e-6);
    const bool positive = m.diff_shape(c.x_lo) > 0;
    for (int i = 0; i < 1000; ++i) {
      const double xi = c.x_lo + (c.x_hi - c.x_lo) * i / 999.0;
      ASSERT_EQ(m.diff_shape(xi) > 0, positive) << m.name();
      ASSERT_NE(m.diff_shape(xi), 0.0);
    }
  }
}

TEST(Models, LogStateDriftIsItoCorrection) {
  const double sigma = 0.3;
  for (const ModelPtr& m : {builtin_logistic(), builtin_gbm()}) {
    ASSERT_TRUE(m->positivity_transform());
    const Eigen::VectorXd th = m->dim() == 3 ? Eigen::Vector3d(1.0, 0.5, 1.2).eval() : Eigen::VectorXd::Constant(1, 0.4);
    for (double x : {0.1, 1.0, 3.0}) {
      const double b = m->diff_shape(x);
      EXPECT_NEAR(m->log_state_drift(x, as_span(th), sigma),
                  m->drift(x, as_span(th)) / x - sigma * b * b / (2 * x * x), 1e-13);
    }
  }
  EXPECT_FALSE(builtin_ou()->positivity_transform());
}

TEST(Models, DomainsDescribeThemselves) {
  EXPECT_EQ(builtin_logistic()->domain().describe(), "E=(0,inf)");
  EXPECT_EQ(builtin_ou()->domain().describe(), "E=(-inf,inf)");
  EXPECT_FALSE(builtin_gbm()->domain().contains(0.0));
  EXPECT_TRUE(builtin_gbm()->domain().contains(1e-300));
}

TEST(Models, ErgodicRegions) {
  const auto lg = builtin_logistic();
  const std::vector<double> good{1.0, 1.0, 1.0}, bad{0.1, 1.0, 1.0};
  EXPECT_TRUE(lg->is_ergodic(good, 0.5));
  EXPECT_FALSE(lg->is_ergodic(bad, 0.5));
  const auto ou = builtin_ou();
  EXPECT_TRUE(ou->is_ergodic(std::vector<double>{0.0, 1.0}, 1.0));
  EXPECT_FALSE(ou->is_ergodic(std::vector<double>{0.0, -1.0}, 1.0));
  EXPECT_FALSE(builtin_gbm()->is_ergodic(std::vector<double>{0.1}, 1.0));
}

TEST(Models, StationaryDensitiesIntegrateToOne) {
  const std::vector<double> lth{1.2, 0.8, 1.5};
  const auto lg = builtin_logistic();
  const double mass_l = trapezoid([&](double x) { return *lg->stationary_density(x, lth, 0.4); }, 1e-9, 40.0, 400000);
  EXPECT_NEAR(mass_l, 1.0, 1e-6);
  const std::vector<double> oth{0.5, 2.0};
  const auto ou = builtin_ou();
  const double mass_o = trapezoid([&](double x) { return *ou->stationary_density(x, oth, 0.7); }, -10.0, 10.0, 200000);
  EXPECT_NEAR(mass_o, 1.0, 1e-9);
  EXPECT_FALSE(lg->stationary_density(1.0, std::vector<double>{0.1, 1.0, 1.0}, 0.5).has_value());
}

TEST(Models, LogisticMomentsMatchNumericIntegration) {
  const std::vector<double> th{1.2, 0.8, 1.5};
  const double sigma = 0.4;
  const auto lg = builtin_logistic();
  for (int p = 1; p <= 3; ++p) {
    const double numeric = trapezoid(
        [&](double x) { return std::pow(x, th[2] * p) * *lg->stationary_density(x, th, sigma); }, 1e-9, 40.0, 400000);
    EXPECT_NEAR(logistic_stationary_moments(th, sigma, p), numeric, 1e-6 * numeric) << "p=" << p;
  }
  EXPECT_THROW(logistic_stationary_moments(th, sigma, 0), DomainError);
  EXPECT_THROW(logistic_stationary_moments(std::vector<double>{0.1, 1.0, 1.0}, 0.5, 1), NotErgodic);
}

TEST(ParameterSpaceTest, ValidationAndShrink) {
  EXPECT_THROW(ParameterSpace(Eigen::Vector2d(0, 1), Eigen::Vector2d(1, 1)), ConfigError);
  EXPECT_THROW(ParameterSpace(Eigen::Vector2d(0, -INFINITY), Eigen::Vector2d(1, 1)), ConfigError);
  const ParameterSpace box(Eigen::Vector2d(0, -1), Eigen::Vector2d(1, 1));
  EXPECT_TRUE(box.contains(Eigen::Vector2d(0.5, 0)));
  EXPECT_FALSE(box.contains(Eigen::Vector2d(0.0, 0)));
  const ParameterSpace s = box.shrunk(0.1);
  EXPECT_NEAR(s.lower()[0], 0.1, 1e-15);
  EXPECT_NEAR(s.upper()[1], 0.8, 1e-15);
}

TEST(Registry, CreatesBuiltinsAndRejectsUnknown) {
  auto& reg = ModelRegistry::instance();
  for (const char* n : {"logistic", "ou", "gbm", "constant"}) EXPECT_EQ(reg.create(n)->name(), n);
  try {
    reg.create("heston");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("logistic"), std::string::npos);
  }
  reg.register_model("ou_narrow", [](double) {
    return with_param_space(builtin_ou(), ParameterSpace(Eigen::Vector2d(-1, 0.1), Eigen::Vector2d(1, 2)));
  });
  const auto m = reg.create("ou_narrow");
  EXPECT_EQ(m->param_space().upper()[1], 2.0);
  EXPECT_EQ(m->drift(1.0, std::vector<double>{0.5, 2.0}), builtin_ou()->drift(1.0, std::vector<double>{0.5, 2.0}));
}

TEST(Registry, LogisticBoxFollowsSigma) {
  const auto m = ModelRegistry::instance().create("logistic", 1.0);
  EXPECT_NEAR(m->param_space().lower()[0], 0.55, 1e-15);
  EXPECT_GT(ModelRegistry::instance().create("logistic", 40.0)->param_space().upper()[0], 20.0);
}
