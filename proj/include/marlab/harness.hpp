#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "marlab/arrays.hpp"

namespace marlab {

inline constexpr const char* kVersion = "0.1.0";
/// Environment override for the output directory (nothing else is
/// overridable from the environment).
inline constexpr const char* kOutDirEnv = "MARLAB_OUT";

/// Command-line overrides applied on top of a config file.
struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
};

struct RunResult {
    bool pass = true;
    std::string csv_path;
    std::string json_path;
    nlohmann::json report;
};

/// Runs one experiment described by a config object. Writes <name>.csv
/// (numeric tables, byte-deterministic for a fixed config + seed) and
/// <name>.json (config echo, verdicts, wall clock, version). Unknown or
/// ill-typed keys raise ValidationError naming the key path.
RunResult run_config(const nlohmann::json& config, const RunOptions& opts = {});
RunResult run_config_file(const std::string& path, const RunOptions& opts = {});

/// Shared config-fragment parsers, exposed for the CLI flag path and tests.
WeightSchedule parse_schedule_config(const nlohmann::json& j, const std::string& path);
ArrayDistribution parse_generator_config(const nlohmann::json& j, const std::string& path);
RegressionProblem parse_problem_config(const nlohmann::json& j, const std::string& path);

/// Shorthand used by CLI flags: "1/n", "const", or "n^-0.8".
nlohmann::json schedule_shorthand(const std::string& text, double p);

}  // namespace marlab
