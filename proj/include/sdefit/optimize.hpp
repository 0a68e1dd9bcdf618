#pragma once

#include <functional>

#include <Eigen/Dense>

#include "sdefit/models.hpp"

namespace sdefit {

/// Smooth objective to be maximized: value, gradient, Hessian.
struct Objective {
  std::function<double(const Eigen::VectorXd&)> value;
  /// Must fill grad (size d) and hess (d x d); returns the value.
  std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&, Eigen::MatrixXd&)> derivs;
};

struct NewtonOptions {
  int max_iter = 200;
  /// Stationarity: |grad|_inf <= tol_grad * (1 + |value|).
  double tol_grad = 1e-8;
  double armijo_c = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 60;
};

struct LocalMaximum {
  Eigen::VectorXd theta;
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  int iterations = 0;
  bool stationary = false;
  bool hessian_negdef = false;
  bool boundary_hit = false;
};

/// Damped Newton ascent inside the box: the Hessian is shifted until
/// negative definite, steps are projected onto the box and accepted by
/// Armijo backtracking. Throws NonFiniteCriterion on a non-finite evaluation.
LocalMaximum projected_newton(const Objective& f, const ParameterSpace& box,
                              const Eigen::VectorXd& start, const NewtonOptions& opts = {});

/// Latin hypercube of `count` points in the box, reproducible from `seed`.
std::vector<Eigen::VectorXd> latin_hypercube(const ParameterSpace& box, int count,
                                             std::uint64_t seed);

bool is_negative_definite(const Eigen::MatrixXd& m);

}  // namespace sdefit
