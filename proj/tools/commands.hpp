#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace sdefit::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_internal = 1,
  exit_config = 2,
  exit_domain = 3,
  exit_not_converged = 4,
  exit_verdict_failed = 5,
};

struct SimulateArgs {
  std::optional<std::string> config;
  std::string model;
  std::vector<double> theta;
  double sigma = 0.0;
  double x0 = 0.0;
  double T = 1.0;
  std::size_t n = 0;
  std::uint64_t seed = 0;
  std::size_t fine_ratio = 1;
  std::string out = "path.csv";
};

struct EstimateArgs {
  std::optional<std::string> config;
  std::string input;
  std::string model;
  std::vector<double> theta0;
  std::string bounds;
  int multistart = 8;
  std::uint64_t seed = 0;
  std::vector<double> fixed_theta;
  bool want_stderr = false;
  std::string out = "result.json";
  int threads = 1;
};

struct McArgs {
  std::string config;
  std::string out;
  std::optional<std::string> csv_dir;
  int threads = 1;
};

int cmd_simulate(const SimulateArgs& a);
int cmd_estimate(const EstimateArgs& a);
int cmd_mc(const McArgs& a);

/// Parses argv and dispatches; returns the process exit code.
int run(int argc, char** argv);

}  // namespace sdefit::cli
