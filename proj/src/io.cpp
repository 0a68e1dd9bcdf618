#include "sdefit/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "sdefit/errors.hpp"

namespace sdefit::io {

using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string path_csv(PathView path) {
  std::string out = "t,x\n";
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    out += format_double(path.times[i]);
    out += ',';
    out += format_double(path.states[i]);
    out += '\n';
  }
  return out;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

ObservedPath parse_path_csv(const std::string& text) {
  std::vector<double> t, x;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    if (!header_seen) {
      if (row != "t,x") throw ConfigError("line " + std::to_string(lineno) + ": expected header 't,x'");
      header_seen = true;
      continue;
    }
    const auto comma = row.find(',');
    double tv = 0.0, xv = 0.0;
    if (comma == std::string_view::npos || row.find(',', comma + 1) != std::string_view::npos ||
        !parse_number(row.substr(0, comma), tv) || !parse_number(row.substr(comma + 1), xv)) {
      throw ConfigError("line " + std::to_string(lineno) + ": malformed row '" + std::string(row) + "'");
    }
    if (!t.empty() && !(tv > t.back())) {
      throw ConfigError("line " + std::to_string(lineno) + ": times must be strictly increasing");
    }
    t.push_back(tv);
    x.push_back(xv);
  }
  if (!header_seen) throw ConfigError("empty CSV: expected header 't,x'");
  if (t.size() < 2) throw ConfigError("CSV needs at least two observations");
  try {
    return ObservedPath(std::move(t), std::move(x));
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
}

ObservedPath read_path_csv(const std::filesystem::path& file) { return parse_path_csv(read_file(file)); }

json sidecar_json(const FineGridPath& path) {
  return {{"schema", 1},
          {"model_name", path.model_name},
          {"theta_true", path.theta_true},
          {"sigma_true", path.sigma_true},
          {"seed", path.seed},
          {"stream", path.stream},
          {"n", path.n_fine()},
          {"T", path.horizon()}};
}

namespace {

json vec(const Eigen::VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

}  // namespace

json to_json(const EstimateResult& r) {
  return {{"theta_hat", vec(r.theta_hat)},
          {"sigma_hat", r.sigma_hat ? json(*r.sigma_hat) : json(nullptr)},
          {"criterion_value", r.criterion_value},
          {"gradient_norm", r.gradient_norm},
          {"hessian_negdef", r.hessian_negdef},
          {"iterations", r.iterations},
          {"converged", r.converged},
          {"multistart_count", r.multistart_count},
          {"multistart_agreement", r.multistart_agreement},
          {"selected_start", r.selected_start},
          {"std_error", r.std_error ? vec(*r.std_error) : json(nullptr)},
          {"note", r.note}};
}

json to_json(const OptimOptions& o) {
  json j = {{"multistart", o.multistart},
            {"box_margin", o.box_margin},
            {"seed", o.seed},
            {"want_stderr", o.want_stderr},
            {"newton",
             {{"max_iter", o.newton.max_iter},
              {"tol_grad", o.newton.tol_grad},
              {"armijo_c", o.newton.armijo_c},
              {"backtrack", o.newton.backtrack},
              {"max_backtracks", o.newton.max_backtracks}}}};
  j["theta0"] = o.theta0 ? vec(*o.theta0) : json(nullptr);
  if (o.bounds) {
    j["bounds"] = {{"lower", vec(o.bounds->lower())}, {"upper", vec(o.bounds->upper())}};
  } else {
    j["bounds"] = nullptr;
  }
  return j;
}

std::string read_file(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& file, const std::string& content) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + file.string());
  out << content;
  if (!out) throw ConfigError("failed writing " + file.string());
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

}  // namespace sdefit::io
