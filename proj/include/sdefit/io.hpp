#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "sdefit/estimate.hpp"
#include "sdefit/simulate.hpp"

namespace sdefit::io {

/// "%.17g": shortest form guaranteed to round-trip a double.
std::string format_double(double v);

/// Header `t,x`, one row per observation.
std::string path_csv(PathView path);
/// Parses a `t,x` CSV; ConfigError names the offending line.
ObservedPath parse_path_csv(const std::string& text);
ObservedPath read_path_csv(const std::filesystem::path& file);

nlohmann::json sidecar_json(const FineGridPath& path);

nlohmann::json to_json(const EstimateResult& r);
nlohmann::json to_json(const OptimOptions& o);

std::string read_file(const std::filesystem::path& file);
/// Writes atomically enough for our purposes: truncate then write; ConfigError on failure.
void write_file(const std::filesystem::path& file, const std::string& content);
/// Two-space indented dump with a trailing newline.
std::string dump(const nlohmann::json& j);

}  // namespace sdefit::io
