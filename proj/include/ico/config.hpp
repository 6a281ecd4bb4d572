#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ico/causal_order.hpp"

namespace ico {

// Parsed scenario run configuration. The scenario itself stays in JSON form
// until `build_configured_scenario` resolves names into geometry.
struct RunConfig {
    std::string scenario_name;
    nlohmann::json scenario_params; // object, possibly empty
    std::complex<double> alpha{M_SQRT1_2, 0.0};
    std::complex<double> beta{M_SQRT1_2, 0.0};
    NumericPolicy numerics;
    std::uint64_t seed = 7;
    int sweep_trials = 200;
    std::vector<std::string> stages; // empty = "all"
    // Optional quantum diffeomorphism applied right after construction,
    // one list of named maps per branch (outermost last).
    nlohmann::json transform; // null or object {branch_a: [...], branch_b: [...]}
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Named families addressable from config files.
MetricField metric_from_spec(const nlohmann::json& spec, int dim);
Worldline worldline_from_spec(const nlohmann::json& spec, int dim, CurveRole role);
Diffeomorphism diffeo_from_spec(const nlohmann::json& spec, int dim);
Diffeomorphism diffeo_chain_from_spec(const nlohmann::json& list, int dim);

BranchedScenario build_configured_scenario(const RunConfig& cfg);

} // namespace ico
