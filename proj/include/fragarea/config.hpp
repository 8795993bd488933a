#ifndef FRAGAREA_CONFIG_HPP_
#define FRAGAREA_CONFIG_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

#include "fragarea/measures.hpp"

namespace fragarea {

enum class OutputFormat { csv, json };

/// Parsed run configuration: the measure/alpha pair plus the raw JSON for
/// command-specific sections.
struct RunConfig {
    FragmentationParams params{BrownianMeasure{}, -0.5};
    OutputFormat format = OutputFormat::json;
    std::string out = "-";
    int workers = 1;
    std::uint64_t seed = 0;
    nlohmann::json raw;
};

/// Flag-level overrides applied on top of the config file.
struct CliOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::optional<std::string> out;
    std::optional<int> workers;
};

/// Builds a measure from the CLI schema:
///   {"kind":"brownian"} | {"kind":"beta","c":..,"beta":..}
///   | {"kind":"atomic","atoms":[{"x":..,"w":..},...]}
///   | {"kind":"density-table","points":[{"x":..,"d":..},...],
///      "s_half":..,"s_one":..}
/// Structural schema violations throw ParseError; semantic ones surface
/// later through validate().
DislocationMeasure measure_from_json(const nlohmann::json& spec);

RunConfig parse_config(const nlohmann::json& j);
RunConfig load_config(const std::string& path, const CliOverrides& overrides = {});

/// Command entry points shared by the CLI binary and the tests. Each
/// writes its report to `out`, diagnostics to `err`, and returns the
/// process exit code (0 ok, 1 usage/parse, 2 validation, 3 numeric
/// failure, 4 budget exceeded).
int run_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_moments(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_simulate(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int run_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Exit code for an error that escaped a command.
int exit_code_for(const std::exception& e);

}  // namespace fragarea

#endif  // FRAGAREA_CONFIG_HPP_
