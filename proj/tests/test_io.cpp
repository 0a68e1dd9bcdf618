#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <limits>

#include "sdefit/errors.hpp"
#include "sdefit/io.hpp"
#include "sdefit/models.hpp"
#include "sdefit/simulate.hpp"

using namespace sdefit;

TEST(PathCsv, RoundTripsBitwise) {
  const auto ou = builtin_ou();
  const auto p = euler_path(*ou, Eigen::Vector2d(1, 1), 1.0, 0.1, 1.0, 1000, 4);
  const std::string csv = io::path_csv(p.view());
  EXPECT_EQ(csv.rfind("t,x\n", 0), 0u);
  const ObservedPath back = io::parse_path_csv(csv);
  EXPECT_EQ(back.times(), p.times);
  EXPECT_EQ(back.states(), p.states);
}

TEST(PathCsv, ExtremeValuesRoundTrip) {
  const std::vector<double> t{0.0, 1e-300, 0.1, 1.0 / 3.0};
  const std::vector<double> x{std::numeric_limits<double>::denorm_min(), -1.7976931348623157e308, 0.1, -0.0};
  const ObservedPath back = io::parse_path_csv(io::path_csv({t, x}));
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.times()[i], t[i]);
    EXPECT_EQ(back.states()[i], x[i]);
  }
}

TEST(PathCsv, ErrorsCarryLineNumbers) {
  auto message = [](const std::string& text) {
    try {
      io::parse_path_csv(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("t,x\n0,1\n0.5,abc\n1,2\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("t,x\n0,1\n0.5\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("t,x\n0,1\n0.5,1,2\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("t,x\n0,1\n0,2\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("time,value\n0,1\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("").find("header"), std::string::npos);
  EXPECT_NE(message("t,x\n0,1\n").find("two"), std::string::npos);
}

TEST(PathCsv, ToleratesCrlfAndBlankLines) {
  const ObservedPath p = io::parse_path_csv("t,x\r\n0,1\r\n\r\n1,2\r\n2,4\r\n");
  EXPECT_EQ(p.n(), 2u);
  EXPECT_EQ(p.states()[1], 2.0);
}

TEST(Sidecar, CarriesProvenanceFields) {
  const auto ou = builtin_ou();
  const auto p = euler_path(*ou, Eigen::Vector2d(1, 2), 0.5, 0.0, 1.0, 16, 99);
  const auto j = io::sidecar_json(p);
  EXPECT_EQ(j.at("schema"), 1);
  EXPECT_EQ(j.at("model_name"), "ou");
  EXPECT_EQ(j.at("theta_true"), (std::vector<double>{1, 2}));
  EXPECT_EQ(j.at("sigma_true"), 0.5);
  EXPECT_EQ(j.at("seed"), 99u);
}

TEST(ResultJson, HasEveryField) {
  EstimateResult r;
  r.theta_hat = Eigen::Vector2d(1, 2);
  r.sigma_hat = 0.5;
  const auto j = io::to_json(r);
  for (const char* k : {"theta_hat", "sigma_hat", "criterion_value", "gradient_norm", "hessian_negdef", "iterations",
                        "converged", "multistart_count", "multistart_agreement", "selected_start", "std_error", "note"}) {
    EXPECT_TRUE(j.contains(k)) << k;
  }
  EXPECT_TRUE(j.at("std_error").is_null());
}

TEST(Files, MissingFileIsConfigError) {
  EXPECT_THROW(io::read_file("/nonexistent/dir/file.csv"), ConfigError);
  EXPECT_THROW(io::write_file("/nonexistent/dir/file.csv", "x"), ConfigError);
}

TEST(FormatDouble, SeventeenDigitsRoundTrip) {
  EXPECT_EQ(io::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(io::format_double(1.0), "1");
  EXPECT_EQ(std::stod(io::format_double(M_PI)), M_PI);
}
