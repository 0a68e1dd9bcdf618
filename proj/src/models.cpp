#include "sdefit/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sdefit/errors.hpp"

namespace sdefit {

ParameterSpace::ParameterSpace(Eigen::VectorXd lower, Eigen::VectorXd upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.size() == 0 || lower_.size() != upper_.size()) {
    throw ConfigError("parameter space: lower and upper bounds must have equal positive length");
  }
  for (Eigen::Index i = 0; i < lower_.size(); ++i) {
    if (!(lower_[i] < upper_[i]) || !std::isfinite(lower_[i]) || !std::isfinite(upper_[i])) {
      throw ConfigError("parameter space: need finite lower[" + std::to_string(i) + "] < upper[" +
                        std::to_string(i) + "]");
    }
  }
}

bool ParameterSpace::contains(const Eigen::VectorXd& theta) const {
  if (theta.size() != lower_.size()) return false;
  return ((theta.array() > lower_.array()) && (theta.array() < upper_.array())).all();
}

ParameterSpace ParameterSpace::shrunk(double fraction) const {
  const Eigen::VectorXd margin = fraction * (upper_ - lower_);
  return ParameterSpace(lower_ + margin, upper_ - margin);
}

std::string StateDomain::describe() const {
  auto fmt = [](double v) {
    if (std::isinf(v)) return std::string(v < 0 ? "-inf" : "inf");
    std::ostringstream os;
    os << v;
    return os.str();
  };
  return "E=(" + fmt(lo) + "," + fmt(hi) + ")";
}

double ModelSpec::drift_derivs(double x, std::span<const double> theta, std::span<double> grad,
                               std::span<double> hess) const {
  drift_grad(x, theta, grad);
  if (!hess.empty()) drift_hess(x, theta, hess);
  return drift(x, theta);
}

double ModelSpec::log_state_drift(double x, std::span<const double> theta, double sigma) const {
  const double b = diff_shape(x);
  return drift(x, theta) / x - 0.5 * sigma * (b * b) / (x * x);
}

bool ModelSpec::is_ergodic(std::span<const double>, double) const { return false; }

std::optional<double> ModelSpec::stationary_density(double, std::span<const double>, double) const {
  return std::nullopt;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ParameterSpace box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Eigen::VectorXd l(static_cast<Eigen::Index>(lo.size()));
  Eigen::VectorXd h(static_cast<Eigen::Index>(hi.size()));
  std::copy(lo.begin(), lo.end(), l.data());
  std::copy(hi.begin(), hi.end(), h.data());
  return ParameterSpace(std::move(l), std::move(h));
}

class LogisticModel final : public ModelSpec {
 public:
  explicit LogisticModel(ParameterSpace space) : space_(std::move(space)) {}

  std::string name() const override { return "logistic"; }
  StateDomain domain() const override { return {0.0, kInf}; }
  const ParameterSpace& param_space() const override { return space_; }

  double drift(double x, std::span<const double> th) const override {
    return (th[0] - th[1] * std::pow(x, th[2])) * x;
  }

  void drift_grad(double x, std::span<const double> th, std::span<double> g) const override {
    const double lx = std::log(x);
    const double xg = std::exp(th[2] * lx);
    g[0] = x;
    g[1] = -xg * x;
    g[2] = -th[1] * xg * lx * x;
  }

  void drift_hess(double x, std::span<const double> th, std::span<double> h) const override {
    const double lx = std::log(x);
    const double xg = std::exp(th[2] * lx);
    std::fill(h.begin(), h.end(), 0.0);
    h[1 * 3 + 2] = h[2 * 3 + 1] = -xg * lx * x;
    h[2 * 3 + 2] = -th[1] * xg * lx * lx * x;
  }

  double drift_derivs(double x, std::span<const double> th, std::span<double> g,
                      std::span<double> h) const override {
    const double lx = std::log(x);
    const double xg = std::exp(th[2] * lx);
    g[0] = x;
    g[1] = -xg * x;
    g[2] = -th[1] * xg * lx * x;
    if (!h.empty()) {
      std::fill(h.begin(), h.end(), 0.0);
      h[1 * 3 + 2] = h[2 * 3 + 1] = -xg * lx * x;
      h[2 * 3 + 2] = -th[1] * xg * lx * lx * x;
    }
    return (th[0] - th[1] * xg) * x;
  }

  double diff_shape(double x) const override { return x; }
  double diff_shape_d1(double) const override { return 1.0; }
  bool positivity_transform() const override { return true; }

  double log_state_drift(double x, std::span<const double> th, double sigma) const override {
    return th[0] - th[1] * std::pow(x, th[2]) - 0.5 * sigma;
  }

  bool is_ergodic(std::span<const double> th, double sigma) const override {
    return sigma > 0 && th[0] > sigma / 2 && th[1] > 0 && th[2] > 0;
  }

  bool has_stationary_density() const override { return true; }

  // x^gamma ~ Gamma(A, B), so pi(x) = gamma x^(gamma-1) f_Gamma(x^gamma).
  std::optional<double> stationary_density(double x, std::span<const double> th,
                                           double sigma) const override {
    if (!is_ergodic(th, sigma)) return std::nullopt;
    if (!(x > 0)) return 0.0;
    const double shape = 2.0 * (th[0] - sigma / 2) / (th[2] * sigma);
    const double scale = th[2] * sigma / (2.0 * th[1]);
    const double lx = std::log(x);
    const double y = std::exp(th[2] * lx);
    const double log_pdf_y = (shape - 1.0) * th[2] * lx - y / scale - std::lgamma(shape) -
                             shape * std::log(scale);
    return th[2] * std::exp(log_pdf_y + (th[2] - 1.0) * lx);
  }

 private:
  ParameterSpace space_;
};

class OuModel final : public ModelSpec {
 public:
  explicit OuModel(ParameterSpace space) : space_(std::move(space)) {}

  std::string name() const override { return "ou"; }
  StateDomain domain() const override { return {}; }
  const ParameterSpace& param_space() const override { return space_; }

  double drift(double x, std::span<const double> th) const override { return th[0] - th[1] * x; }
  void drift_grad(double x, std::span<const double>, std::span<double> g) const override {
    g[0] = 1.0;
    g[1] = -x;
  }
  void drift_hess(double, std::span<const double>, std::span<double> h) const override {
    std::fill(h.begin(), h.end(), 0.0);
  }
  double diff_shape(double) const override { return 1.0; }
  double diff_shape_d1(double) const override { return 0.0; }

  bool is_ergodic(std::span<const double> th, double sigma) const override {
    return sigma > 0 && th[1] > 0;
  }
  bool has_stationary_density() const override { return true; }
  std::optional<double> stationary_density(double x, std::span<const double> th,
                                           double sigma) const override {
    if (!is_ergodic(th, sigma)) return std::nullopt;
    const double m = th[0] / th[1];
    const double v = sigma / (2.0 * th[1]);
    return std::exp(-0.5 * (x - m) * (x - m) / v) / std::sqrt(2.0 * M_PI * v);
  }

 private:
  ParameterSpace space_;
};

class GbmModel final : public ModelSpec {
 public:
  explicit GbmModel(ParameterSpace space) : space_(std::move(space)) {}

  std::string name() const override { return "gbm"; }
  StateDomain domain() const override { return {0.0, kInf}; }
  const ParameterSpace& param_space() const override { return space_; }

  double drift(double x, std::span<const double> th) const override { return th[0] * x; }
  void drift_grad(double x, std::span<const double>, std::span<double> g) const override {
    g[0] = x;
  }
  void drift_hess(double, std::span<const double>, std::span<double> h) const override {
    h[0] = 0.0;
  }
  double diff_shape(double x) const override { return x; }
  double diff_shape_d1(double) const override { return 1.0; }
  bool positivity_transform() const override { return true; }
  double log_state_drift(double, std::span<const double> th, double sigma) const override {
    return th[0] - 0.5 * sigma;
  }

 private:
  ParameterSpace space_;
};

class ConstantDriftModel final : public ModelSpec {
 public:
  explicit ConstantDriftModel(ParameterSpace space) : space_(std::move(space)) {}

  std::string name() const override { return "constant"; }
  StateDomain domain() const override { return {}; }
  const ParameterSpace& param_space() const override { return space_; }

  double drift(double, std::span<const double> th) const override { return th[0]; }
  void drift_grad(double, std::span<const double>, std::span<double> g) const override {
    g[0] = 1.0;
  }
  void drift_hess(double, std::span<const double>, std::span<double> h) const override {
    h[0] = 0.0;
  }
  double diff_shape(double) const override { return 1.0; }
  double diff_shape_d1(double) const override { return 0.0; }

 private:
  ParameterSpace space_;
};

class ReboxedModel final : public ModelSpec {
 public:
  ReboxedModel(ModelPtr base, ParameterSpace space)
      : base_(std::move(base)), space_(std::move(space)) {
    if (space_.dim() != base_->dim()) {
      throw ConfigError("bounds for model '" + base_->name() + "' need " +
                        std::to_string(base_->dim()) + " coordinates");
    }
  }

  std::string name() const override { return base_->name(); }
  StateDomain domain() const override { return base_->domain(); }
  const ParameterSpace& param_space() const override { return space_; }
  double drift(double x, std::span<const double> th) const override { return base_->drift(x, th); }
  void drift_grad(double x, std::span<const double> th, std::span<double> g) const override {
    base_->drift_grad(x, th, g);
  }
  void drift_hess(double x, std::span<const double> th, std::span<double> h) const override {
    base_->drift_hess(x, th, h);
  }
  double drift_derivs(double x, std::span<const double> th, std::span<double> g,
                      std::span<double> h) const override {
    return base_->drift_derivs(x, th, g, h);
  }
  double diff_shape(double x) const override { return base_->diff_shape(x); }
  double diff_shape_d1(double x) const override { return base_->diff_shape_d1(x); }
  bool positivity_transform() const override { return base_->positivity_transform(); }
  double log_state_drift(double x, std::span<const double> th, double sigma) const override {
    return base_->log_state_drift(x, th, sigma);
  }
  bool is_ergodic(std::span<const double> th, double sigma) const override {
    return base_->is_ergodic(th, sigma);
  }
  bool has_stationary_density() const override { return base_->has_stationary_density(); }
  std::optional<double> stationary_density(double x, std::span<const double> th,
                                           double sigma) const override {
    return base_->stationary_density(x, th, sigma);
  }

 private:
  ModelPtr base_;
  ParameterSpace space_;
};

}  // namespace

ModelPtr builtin_logistic(const LogisticBounds& b) {
  return std::make_shared<LogisticModel>(box({b.sigma_ref / 2 + b.alpha_margin, b.beta_lo, b.gamma_lo},
                                             {b.alpha_hi, b.beta_hi, b.gamma_hi}));
}

ModelPtr builtin_ou(std::optional<ParameterSpace> space) {
  return std::make_shared<OuModel>(space ? *space : box({-10.0, 1e-3}, {10.0, 20.0}));
}

ModelPtr builtin_gbm(std::optional<ParameterSpace> space) {
  return std::make_shared<GbmModel>(space ? *space : box({-10.0}, {10.0}));
}

ModelPtr constant_drift(std::optional<ParameterSpace> space) {
  return std::make_shared<ConstantDriftModel>(space ? *space : box({-100.0}, {100.0}));
}

ModelPtr with_param_space(ModelPtr base, ParameterSpace space) {
  return std::make_shared<ReboxedModel>(std::move(base), std::move(space));
}

double logistic_stationary_moments(std::span<const double> th, double sigma, int p) {
  if (th.size() != 3) throw DomainError("logistic moments need theta = (alpha, beta, gamma)");
  if (!(sigma > 0) || !(th[0] > sigma / 2)) {
    throw NotErgodic("logistic model is ergodic only for alpha > sigma/2");
  }
  if (!(th[1] > 0) || !(th[2] > 0)) throw NotErgodic("logistic model needs beta > 0, gamma > 0");
  if (p < 1) throw DomainError("moment order must be positive");
  const double shape = 2.0 * (th[0] - sigma / 2) / (th[2] * sigma);
  const double scale = th[2] * sigma / (2.0 * th[1]);
  return std::exp(p * std::log(scale) + std::lgamma(shape + p) - std::lgamma(shape));
}

ModelRegistry& ModelRegistry::instance() {
  static ModelRegistry registry;
  return registry;
}

ModelRegistry::ModelRegistry() {
  factories_ = {
      {"logistic", [](double s) { return builtin_logistic(LogisticBounds{.sigma_ref = s, .alpha_hi = std::max(10.0, s / 2 + 10.0)}); }},
      {"ou", [](double) { return builtin_ou(); }},
      {"gbm", [](double) { return builtin_gbm(); }},
      {"constant", [](double) { return constant_drift(); }},
  };
}

void ModelRegistry::register_model(const std::string& name, Factory factory) {
  for (auto& [n, f] : factories_) {
    if (n == name) {
      f = factory;
      return;
    }
  }
  factories_.emplace_back(name, factory);
}

ModelPtr ModelRegistry::create(const std::string& name, double sigma_ref) const {
  for (const auto& [n, f] : factories_) {
    if (n == name) return f(sigma_ref);
  }
  std::string known;
  for (const auto& n : names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown model '" + name + "' (known: " + known + ")");
}

std::vector<std::string> ModelRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [n, f] : factories_) out.push_back(n);
  return out;
}

}  // namespace sdefit
