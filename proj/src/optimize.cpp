#include "sdefit/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sdefit/errors.hpp"
#include "sdefit/rng.hpp"

namespace sdefit {

namespace {

Eigen::VectorXd clamp_to(const ParameterSpace& box, const Eigen::VectorXd& x) {
  return x.cwiseMax(box.lower()).cwiseMin(box.upper());
}

[[noreturn]] void non_finite(const Eigen::VectorXd& x) {
  throw NonFiniteCriterion("criterion is not finite at theta",
                           std::vector<double>(x.data(), x.data() + x.size()));
}

bool finite_eval(double f, const Eigen::VectorXd& g, const Eigen::MatrixXd& h) {
  return std::isfinite(f) && g.allFinite() && h.allFinite();
}

}  // namespace

bool is_negative_definite(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.info() == Eigen::Success && es.eigenvalues().maxCoeff() < 0.0;
}

LocalMaximum projected_newton(const Objective& f, const ParameterSpace& box,
                              const Eigen::VectorXd& start, const NewtonOptions& opts) {
  const Eigen::Index d = box.dim();
  const Eigen::VectorXd width = box.upper() - box.lower();

  LocalMaximum out;
  Eigen::VectorXd x = clamp_to(box, start);
  Eigen::VectorXd g(d);
  Eigen::MatrixXd h(d, d);
  double fx = f.derivs(x, g, h);
  if (!finite_eval(fx, g, h)) non_finite(x);

  auto at_lower = [&](Eigen::Index i) { return x[i] <= box.lower()[i]; };
  auto at_upper = [&](Eigen::Index i) { return x[i] >= box.upper()[i]; };

  int iter = 0;
  for (; iter < opts.max_iter; ++iter) {
    // Coordinates pinned on the boundary with the gradient pointing outwards.
    std::vector<Eigen::Index> free;
    for (Eigen::Index i = 0; i < d; ++i) {
      const bool pinned = (at_lower(i) && g[i] < 0) || (at_upper(i) && g[i] > 0);
      if (!pinned) free.push_back(i);
    }
    const double tol = opts.tol_grad * (1.0 + std::abs(fx));
    double free_grad = 0.0;
    for (auto i : free) free_grad = std::max(free_grad, std::abs(g[i]));
    if (free_grad <= tol && (free.size() < static_cast<std::size_t>(d) || is_negative_definite(h))) {
      break;
    }
    if (free.empty()) break;

    const auto nf = static_cast<Eigen::Index>(free.size());
    Eigen::MatrixXd m(nf, nf);
    Eigen::VectorXd gf(nf);
    for (Eigen::Index a = 0; a < nf; ++a) {
      gf[a] = g[free[a]];
      for (Eigen::Index b = 0; b < nf; ++b) m(a, b) = -h(free[a], free[b]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    if (es.info() != Eigen::Success) non_finite(x);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const double floor = 1e-8 * scale;
    // Shift the spectrum so that -H is positive definite.
    Eigen::VectorXd lambda = es.eigenvalues();
    const double shift = lambda.minCoeff() < floor ? floor - lambda.minCoeff() : 0.0;
    lambda.array() += shift;
    const Eigen::VectorXd pf =
        es.eigenvectors() * ((es.eigenvectors().transpose() * gf).array() / lambda.array()).matrix();
    Eigen::VectorXd p = Eigen::VectorXd::Zero(d);
    for (Eigen::Index a = 0; a < nf; ++a) p[free[a]] = pf[a];

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd xt;
    double ft = fx;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt, t *= opts.backtrack) {
      xt = clamp_to(box, x + t * p);
      const double slope = g.dot(xt - x);
      if (!(slope > 0)) continue;
      ft = f.value(xt);
      if (std::isfinite(ft) && ft >= fx + opts.armijo_c * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    x = xt;
    fx = f.derivs(x, g, h);
    if (!finite_eval(fx, g, h)) non_finite(x);
  }

  out.theta = x;
  out.value = fx;
  out.gradient = g;
  out.hessian = h;
  out.iterations = iter;
  out.hessian_negdef = is_negative_definite(h);
  out.stationary = g.cwiseAbs().maxCoeff() <= opts.tol_grad * (1.0 + std::abs(fx));
  for (Eigen::Index i = 0; i < d; ++i) {
    if (x[i] - box.lower()[i] <= 1e-12 * width[i] || box.upper()[i] - x[i] <= 1e-12 * width[i]) {
      out.boundary_hit = true;
    }
  }
  return out;
}

std::vector<Eigen::VectorXd> latin_hypercube(const ParameterSpace& box, int count,
                                             std::uint64_t seed) {
  const int d = box.dim();
  const RandomStream rng(seed, 0x4C48530000000000ull);
  std::uint64_t draw = 0;
  std::vector<Eigen::VectorXd> pts(static_cast<std::size_t>(count), Eigen::VectorXd(d));
  std::vector<int> perm(static_cast<std::size_t>(count));
  for (int j = 0; j < d; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = count - 1; i > 0; --i) {
      const auto k = static_cast<int>(rng.below(draw++, static_cast<std::uint64_t>(i) + 1));
      std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(k)]);
    }
    for (int i = 0; i < count; ++i) {
      const double u = (perm[static_cast<std::size_t>(i)] + rng.uniform(draw++)) / count;
      pts[static_cast<std::size_t>(i)][j] = box.lower()[j] + u * (box.upper()[j] - box.lower()[j]);
    }
  }
  return pts;
}

}  // namespace sdefit
