#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "sdefit/rng.hpp"
#include "sdefit/simulate.hpp"

namespace sdefit::testing {

/// Central differences of a scalar function.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double rel_step = 1e-6) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

/// Central differences of a vector-valued function (one column per coordinate).
inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double rel_step = 1e-5) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    j.col(i) = (f(a) - f(b)) / (2 * h);
  }
  return j;
}

/// Relative error |a - b| / max(1, |b|), elementwise maximum.
inline double rel_err(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return ((a - b).array().abs() / b.array().abs().max(1.0)).maxCoeff();
}

/// Brownian-bridge refinement: each increment over h splits into two over h/2
/// with the same sum.
inline std::vector<double> refine_increments(const std::vector<double>& dw, double h,
                                             std::uint64_t seed) {
  const RandomStream rng(seed, 77);
  std::vector<double> out;
  out.reserve(2 * dw.size());
  for (std::size_t i = 0; i < dw.size(); ++i) {
    const double first = dw[i] / 2 + std::sqrt(h / 4) * rng.normal(i);
    out.push_back(first);
    out.push_back(dw[i] - first);
  }
  return out;
}

}  // namespace sdefit::testing
