#include "commands.hpp"

#include <CLI11.hpp>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include "sdefit/errors.hpp"
#include "sdefit/estimate.hpp"
#include "sdefit/io.hpp"
#include "sdefit/likelihood.hpp"
#include "sdefit/mc_harness.hpp"
#include "sdefit/models.hpp"
#include "sdefit/simulate.hpp"
#include "sdefit/strict_json.hpp"

namespace sdefit::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

bool use_color() { return std::getenv("NO_COLOR") == nullptr && ::isatty(2) == 1; }

void report(const char* label, const char* ansi, const std::string& msg) {
  if (use_color()) {
    std::cerr << "sdefit: " << ansi << label << "\033[0m: " << msg << "\n";
  } else {
    std::cerr << "sdefit: " << label << ": " << msg << "\n";
  }
}

void warn(const std::string& msg) { report("warning", "\033[33m", msg); }

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

json load_json(const std::string& file) {
  try {
    return json::parse(io::read_file(file));
  } catch (const json::parse_error& e) {
    throw ConfigError(file + ": " + e.what());
  }
}

/// Config file values fill in every flag that was not given on the command line.
class Overlay {
 public:
  Overlay(const std::optional<std::string>& file, const CLI::App& app) : app_(app) {
    if (!file) return;
    doc_ = load_json(*file);
    obj_.emplace(doc_, *file);
    if (obj_->get<int>("schema") != 1) throw ConfigError(*file + ": unsupported schema (expected 1)");
  }

  template <class T>
  void apply(const std::string& key, T& target) {
    if (!obj_) return;
    std::string dashed = key;
    std::replace(dashed.begin(), dashed.end(), '_', '-');
    const bool given = app_.get_option("--" + dashed)->count() > 0;
    if (obj_->has(key) && !given) target = obj_->get<T>(key);
  }

  void finish() const {
    if (obj_) obj_->reject_unknown();
  }

 private:
  const CLI::App& app_;
  json doc_;
  std::optional<StrictObject> obj_;
};

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void check_theta(const ModelSpec& model, const std::vector<double>& theta, const std::string& flag) {
  if (static_cast<int>(theta.size()) != model.dim()) {
    throw ConfigError(flag + " has " + std::to_string(theta.size()) + " entries; model '" + model.name() +
                      "' expects " + std::to_string(model.dim()));
  }
}

/// "lo:hi,lo:hi,..." with one pair per parameter.
ParameterSpace parse_bounds(const std::string& text, int dim) {
  std::vector<double> lo, hi;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, end - pos);
    const std::size_t colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("--bounds: expected lo:hi, got '" + item + "'");
    try {
      std::size_t used = 0;
      lo.push_back(std::stod(item.substr(0, colon), &used));
      if (used != colon) throw std::invalid_argument("");
      const std::string rhs = item.substr(colon + 1);
      hi.push_back(std::stod(rhs, &used));
      if (used != rhs.size()) throw std::invalid_argument("");
    } catch (const std::logic_error&) {
      throw ConfigError("--bounds: cannot parse '" + item + "'");
    }
    pos = end + 1;
  }
  if (static_cast<int>(lo.size()) != dim) {
    throw ConfigError("--bounds has " + std::to_string(lo.size()) + " pairs; model expects " + std::to_string(dim));
  }
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] < hi[i])) throw ConfigError("--bounds: lower must be below upper in every coordinate");
  }
  return ParameterSpace(to_eigen(lo), to_eigen(hi));
}

}  // namespace

int cmd_simulate(const SimulateArgs& a) {
  if (a.model.empty()) throw ConfigError("--model is required");
  if (a.n < 1) throw ConfigError("--n must be a positive number of intervals");
  if (a.fine_ratio < 1) throw ConfigError("--fine-ratio must be >= 1");
  if (!(a.sigma > 0.0)) throw ConfigError("--sigma must be > 0");
  if (!(a.T > 0.0)) throw ConfigError("--T must be > 0");
  const ModelPtr model = ModelRegistry::instance().create(a.model, a.sigma);
  check_theta(*model, a.theta, "--theta");
  const Eigen::VectorXd theta = to_eigen(a.theta);
  if (!model->domain().contains(a.x0)) {
    throw DomainError("x0 = " + num(a.x0) + " lies outside the state domain " + model->domain().describe());
  }
  const fs::path out(a.out);
  fs::path sidecar = out;
  sidecar.replace_extension(".json");
  if (sidecar == out) throw ConfigError("--out must not end in .json (the sidecar takes that name)");

  const FineGridPath fine = euler_path(*model, theta, a.sigma, a.x0, a.T, a.n * a.fine_ratio, a.seed);
  const ObservedPath obs = subsample(fine, a.n);
  json meta = io::sidecar_json(fine);
  meta["n"] = a.n;
  meta["fine_ratio"] = a.fine_ratio;
  meta["x0"] = a.x0;
  io::write_file(out, io::path_csv(obs.view()));
  io::write_file(sidecar, io::dump(meta));

  const auto [lo, hi] = std::minmax_element(obs.states().begin(), obs.states().end());
  std::cout << "simulated " << model->name() << ": n=" << obs.n() << " T=" << num(obs.horizon())
            << " min=" << num(*lo) << " max=" << num(*hi) << " -> " << out.string() << "\n";
  return exit_ok;
}

int cmd_estimate(const EstimateArgs& a) {
  if (a.input.empty()) throw ConfigError("--input is required");
  if (a.model.empty()) throw ConfigError("--model is required");
  if (a.multistart < 1) throw ConfigError("--multistart must be >= 1");
  const ObservedPath obs = io::read_path_csv(a.input);
  const ModelPtr model = ModelRegistry::instance().create(a.model);

  json doc = {{"schema", 1}, {"model", model->name()}, {"input", a.input}, {"n", obs.n()}, {"T", obs.horizon()}};

  if (!a.fixed_theta.empty()) {
    check_theta(*model, a.fixed_theta, "--fixed-theta");
    const double s = sigma_hat(obs.view(), *model, to_eigen(a.fixed_theta));
    doc["mode"] = "fixed_theta";
    doc["theta"] = a.fixed_theta;
    doc["sigma_hat"] = s;
    io::write_file(a.out, io::dump(doc));
    std::cout << "sigma_hat=" << io::format_double(s) << " -> " << a.out << "\n";
    return exit_ok;
  }

  OptimOptions o;
  o.multistart = a.multistart;
  o.seed = a.seed;
  o.want_stderr = a.want_stderr;
  o.threads = a.threads;
  if (!a.theta0.empty()) {
    check_theta(*model, a.theta0, "--theta0");
    o.theta0 = to_eigen(a.theta0);
  }
  if (!a.bounds.empty()) o.bounds = parse_bounds(a.bounds, model->dim());
  doc["mode"] = "amle";
  doc["options"] = io::to_json(o);

  try {
    const EstimateResult r = amle(obs, *model, o);
    doc["result"] = io::to_json(r);
    io::write_file(a.out, io::dump(doc));
    std::cout << "theta_hat=";
    for (Eigen::Index i = 0; i < r.theta_hat.size(); ++i) {
      std::cout << (i ? "," : "") << io::format_double(r.theta_hat[i]);
    }
    std::cout << " sigma_hat=" << (r.sigma_hat ? io::format_double(*r.sigma_hat) : "n/a")
              << " converged=" << (r.converged ? "true" : "false") << " -> " << a.out << "\n";
    if (!r.converged) {
      warn("optimizer did not converge (" + r.note + ")");
      return exit_not_converged;
    }
    return exit_ok;
  } catch (const NoInteriorMaximum& e) {
    doc["result"] = nullptr;
    doc["error"] = e.what();
    io::write_file(a.out, io::dump(doc));
    warn(std::string("optimizer did not converge: ") + e.what());
    return exit_not_converged;
  }
}

int cmd_mc(const McArgs& a) {
  const ExperimentConfig cfg = parse_experiment_config(load_json(a.config));
  if (cfg.replications < 30) {
    warn("replications=" + std::to_string(cfg.replications) + " is below the recommended 30");
  }
  const McReport rep = run_experiment(cfg, a.threads);
  io::write_file(a.out, io::dump(to_json(rep)));
  if (a.csv_dir) {
    const fs::path dir(*a.csv_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create " + dir.string() + ": " + ec.message());
    io::write_file(dir / "rows.csv", rows_csv(rep));
    io::write_file(dir / "cells.csv", cells_csv(rep));
  }
  for (const auto& [name, v] : rep.verdicts) {
    std::cout << name << ": " << v.status;
    if (v.value) std::cout << " (value " << num(*v.value) << ", " << v.threshold << ")";
    else if (!v.threshold.empty()) std::cout << " (" << v.threshold << ")";
    std::cout << "\n";
  }
  std::cout << (rep.all_pass() ? "all verdicts pass" : "verdict failed") << " -> " << a.out << "\n";
  return rep.all_pass() ? exit_ok : exit_verdict_failed;
}

int run(int argc, char** argv) {
  CLI::App app{"Approximate maximum likelihood estimation for scalar SDEs"};
  app.name("sdefit");
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all", "Show help for every subcommand");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate an Euler-Maruyama path and write it as CSV plus a JSON sidecar");
  s->add_option("--config", sim.config, "JSON file supplying any of the flags below (keys use underscores)");
  s->add_option("--model", sim.model, "Model name: logistic, ou, gbm, constant");
  s->add_option("--theta", sim.theta, "Drift parameter, comma separated")->delimiter(',');
  s->add_option("--sigma", sim.sigma, "Diffusion coefficient sigma > 0");
  s->add_option("--x0", sim.x0, "Initial state, must lie in the state domain");
  s->add_option("--T", sim.T, "Time horizon")->capture_default_str();
  s->add_option("--n", sim.n, "Number of observed intervals (the CSV has n+1 rows)");
  s->add_option("--seed", sim.seed, "Random seed")->capture_default_str();
  s->add_option("--fine-ratio", sim.fine_ratio, "Simulate on n*ratio steps, then keep every ratio-th point")
      ->capture_default_str();
  s->add_option("--out", sim.out, "Output CSV; the sidecar replaces the extension with .json")->capture_default_str();

  EstimateArgs est;
  auto* e = app.add_subcommand("estimate", "Fit drift and diffusion parameters to an observed t,x CSV path");
  e->add_option("--config", est.config, "JSON file supplying any of the flags below (keys use underscores)");
  e->add_option("--input", est.input, "Input CSV with header t,x");
  e->add_option("--model", est.model, "Model name: logistic, ou, gbm, constant");
  e->add_option("--theta0", est.theta0, "Extra starting point, comma separated")->delimiter(',');
  e->add_option("--bounds", est.bounds, "Parameter box as lo:hi pairs, comma separated");
  e->add_option("--multistart", est.multistart, "Number of optimizer starts")->capture_default_str();
  e->add_option("--seed", est.seed, "Seed of the Latin hypercube starts")->capture_default_str();
  e->add_option("--fixed-theta", est.fixed_theta, "Skip optimization; report sigma-hat at this theta")
      ->delimiter(',');
  e->add_flag("--stderr", est.want_stderr, "Attach Fisher-information standard errors (ergodic models)");
  e->add_option("--out", est.out, "Output JSON")->capture_default_str();
  e->add_option("--threads", est.threads, "Worker threads for the multistart")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  McArgs mc;
  auto* m = app.add_subcommand("mc", "Run a Monte Carlo experiment and gate it against its thresholds");
  m->add_option("--config", mc.config, "Experiment JSON")->required();
  m->add_option("--out", mc.out, "Report JSON")->required();
  m->add_option("--csv", mc.csv_dir, "Directory for rows.csv and cells.csv");
  m->add_option("--threads", mc.threads, "Worker threads for replications")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  app.footer(
      "Exit codes: 0 ok, 2 config error, 3 domain error, 4 optimizer not converged, "
      "5 Monte Carlo verdict failed.");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::CallForAllHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    report("error", "\033[31m", err.what());
    std::cerr << "Run with --help for usage.\n";
    return exit_config;
  }

  try {
    if (s->parsed()) {
      Overlay ov(sim.config, *s);
      ov.apply("model", sim.model);
      ov.apply("theta", sim.theta);
      ov.apply("sigma", sim.sigma);
      ov.apply("x0", sim.x0);
      ov.apply("T", sim.T);
      ov.apply("n", sim.n);
      ov.apply("seed", sim.seed);
      ov.apply("fine_ratio", sim.fine_ratio);
      ov.apply("out", sim.out);
      ov.finish();
      return cmd_simulate(sim);
    }
    if (e->parsed()) {
      Overlay ov(est.config, *e);
      ov.apply("input", est.input);
      ov.apply("model", est.model);
      ov.apply("theta0", est.theta0);
      ov.apply("bounds", est.bounds);
      ov.apply("multistart", est.multistart);
      ov.apply("seed", est.seed);
      ov.apply("fixed_theta", est.fixed_theta);
      ov.apply("stderr", est.want_stderr);
      ov.apply("out", est.out);
      ov.apply("threads", est.threads);
      ov.finish();
      if (est.threads < 1) throw ConfigError("threads must be >= 1");
      return cmd_estimate(est);
    }
    return cmd_mc(mc);
  } catch (const ConfigError& err) {
    report("error", "\033[31m", err.what());
    return exit_config;
  } catch (const NoInteriorMaximum& err) {
    report("error", "\033[31m", err.what());
    return exit_not_converged;
  } catch (const Error& err) {
    report("error", "\033[31m", err.what());
    return exit_domain;
  } catch (const json::exception& err) {
    report("error", "\033[31m", err.what());
    return exit_config;
  } catch (const std::exception& err) {
    report("internal error", "\033[31m", err.what());
    return exit_internal;
  }
}

}  // namespace sdefit::cli
