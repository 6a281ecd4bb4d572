#pragma once

#include "ico/config.hpp"

namespace ico {

// Stage names accepted by the runner: verdict, align, lightcones, sweep,
// protocol, all. Stages run in that canonical order; lightcones implies
// align.
struct PipelineResult {
    nlohmann::json result;       // result.json payload
    std::string worldlines_csv;  // branch, curve, lambda, coords...
    std::string bloch_csv;       // x, y, z, class
};

struct PipelineOverrides {
    std::vector<std::string> stages; // empty = use config (or "all")
    int trials = -1;                 // <0 = use config
    long long seed = -1;             // <0 = use config
};

PipelineResult run_pipeline(const RunConfig& cfg, const PipelineOverrides& overrides = {});

} // namespace ico
