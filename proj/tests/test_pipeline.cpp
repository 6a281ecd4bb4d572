#include <string>

#include "doctest.h"
#include "ico/errors.hpp"
#include "ico/pipeline.hpp"

using namespace ico;
using nlohmann::json;

namespace {

const char* kSwitchConfig = R"({
  "scenario": {"name": "gravitational_switch", "params": {"mass": 0.003}},
  "amplitudes": {"alpha": [0.7071067811865476, 0.0], "beta": [0.7071067811865476, 0.0]},
  "numerics": {"seed": 7, "trials": 5},
  "stages": ["verdict", "protocol"]
})";

json strip_timestamp(json j) {
    j.erase("timestamp");
    return j;
}

} // namespace

TEST_CASE("config parsing and validation errors") {
    CHECK_THROWS_AS(parse_config_text("{not json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"scenario\": {}}"), ConfigError);

    const RunConfig bad_name = parse_config_text(
        R"({"scenario": {"name": "does_not_exist", "params": {}}})");
    CHECK_THROWS_WITH_AS(build_configured_scenario(bad_name),
                         doctest::Contains("unknown scenario"), ConfigError);

    CHECK_THROWS_AS(parse_config_text(R"({
        "scenario": {"name": "superposed_paths_switch"},
        "amplitudes": {"alpha": [1.0, 0.0], "beta": [1.0, 0.0]}
    })"),
                    ConfigError); // unnormalized amplitudes

    const RunConfig cfg = parse_config_text(kSwitchConfig);
    CHECK(cfg.scenario_name == "gravitational_switch");
    CHECK(cfg.seed == 7);
    CHECK(cfg.sweep_trials == 5);
    CHECK(cfg.stages == std::vector<std::string>{"verdict", "protocol"});
}

TEST_CASE("amplitudes close to normalized are renormalized exactly") {
    const RunConfig cfg = parse_config_text(R"({
        "scenario": {"name": "superposed_paths_switch"},
        "amplitudes": {"alpha": [0.707107, 0.0], "beta": [0.707107, 0.0]}
    })");
    CHECK(std::norm(cfg.alpha) + std::norm(cfg.beta) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("custom scenarios assemble from named families") {
    const RunConfig cfg = parse_config_text(R"({
      "scenario": {"name": "custom", "params": {
        "dim": 2,
        "branch_a": {
          "metric": {"family": "minkowski"},
          "gamma0": {"family": "uniform", "start": [2.0], "velocity": [-0.6666666666666666], "range": [0, 6]},
          "gamma1": {"family": "static", "x": [1.0], "range": [0, 6]},
          "gamma2": {"family": "static", "x": [-1.0], "range": [0, 6]}
        },
        "branch_b": {
          "metric": {"family": "minkowski"},
          "gamma0": {"family": "uniform", "start": [-2.0], "velocity": [0.6666666666666666], "range": [0, 6]},
          "gamma1": {"family": "static", "x": [1.0], "range": [0, 6]},
          "gamma2": {"family": "static", "x": [-1.0], "range": [0, 6]}
        }
      }}
    })");
    const BranchedScenario sc = build_configured_scenario(cfg);
    CHECK(order_product(sc) == -1);
}

TEST_CASE("custom scenarios run end to end in 3+1 dimensions") {
    const RunConfig cfg = parse_config_text(R"({
      "scenario": {"name": "custom", "params": {
        "dim": 4,
        "branch_a": {
          "metric": {"family": "minkowski"},
          "gamma0": {"family": "uniform", "start": [2.0, 0.0, 0.0],
                      "velocity": [-0.6666666666666666, 0.0, 0.0], "range": [0, 6]},
          "gamma1": {"family": "static", "x": [1.0, 0.0, 0.0], "range": [0, 6]},
          "gamma2": {"family": "static", "x": [-1.0, 0.0, 0.0], "range": [0, 6]}
        },
        "branch_b": {
          "metric": {"family": "minkowski"},
          "gamma0": {"family": "uniform", "start": [-2.0, 0.0, 0.0],
                      "velocity": [0.6666666666666666, 0.0, 0.0], "range": [0, 6]},
          "gamma1": {"family": "static", "x": [1.0, 0.0, 0.0], "range": [0, 6]},
          "gamma2": {"family": "static", "x": [-1.0, 0.0, 0.0], "range": [0, 6]}
        }
      }},
      "numerics": {"seed": 5, "trials": 10}
    })");
    const BranchedScenario sc = build_configured_scenario(cfg);
    CHECK(sc.branch_a.metric.dim == 4);
    CHECK(order_product(sc) == -1);

    PipelineOverrides ov;
    ov.stages = {"verdict", "sweep", "protocol"};
    const PipelineResult res = run_pipeline(cfg, ov);
    CHECK(res.result["sweep"]["passes"] == 10);
    CHECK(res.result["order_qubit"]["class"] == "pure_indefinite");
    CHECK(res.worldlines_csv.rfind("branch,curve,lambda,x0,x1,x2,x3\n", 0) == 0);
}

TEST_CASE("config transforms apply a quantum diffeomorphism after construction") {
    const RunConfig cfg = parse_config_text(R"({
      "scenario": {"name": "superposed_paths_switch"},
      "transform": {
        "branch_a": [{"family": "boost", "v": 0.3}],
        "branch_b": [{"family": "translation", "offset": [1.0, 0.5]},
                      {"family": "sin_shear", "target_axis": 1, "source_axis": 0,
                       "amp": 0.1, "freq": 0.8, "phase": 0.2}]
      }
    })");
    const BranchedScenario sc = build_configured_scenario(cfg);
    CHECK(order_product(sc) == -1); // invariant under the configured maps
}

TEST_CASE("pipeline emits the frozen verdict and order-qubit record") {
    const RunConfig cfg = parse_config_text(kSwitchConfig);
    const PipelineResult res = run_pipeline(cfg);
    const json& r = res.result;

    REQUIRE(r.contains("causal_order"));
    CHECK(r["causal_order"]["product"] == -1);
    CHECK(r["causal_order"]["verdict"] == "indefinite");
    CHECK(r["causal_order"]["branch_a"].contains("tau1"));
    CHECK(r["causal_order"]["branch_a"].contains("tau2"));
    CHECK(r["causal_order"]["branch_a"]["s"] == -1);
    CHECK(r["causal_order"]["branch_b"]["s"] == 1);

    REQUIRE(r.contains("reparametrization"));
    CHECK(r["reparametrization"]["straddles"] == true);

    REQUIRE(r.contains("order_qubit"));
    CHECK(r["order_qubit"]["class"] == "pure_indefinite");
    CHECK(r["order_qubit"]["postselect_prob"].get<double>() ==
          doctest::Approx(0.5).epsilon(1e-12));
    const auto bloch = r["order_qubit"]["bloch"];
    CHECK(bloch[0].get<double>() == doctest::Approx(1.0).epsilon(1e-9));

    REQUIRE(r.contains("protocol"));
    CHECK(r["protocol"]["spin_orthogonal"] == true);
}

TEST_CASE("pipeline stage list controls the emitted sections") {
    RunConfig cfg = parse_config_text(kSwitchConfig);
    PipelineOverrides only_verdict;
    only_verdict.stages = {"verdict"};
    const PipelineResult res = run_pipeline(cfg, only_verdict);
    CHECK(res.result.contains("causal_order"));
    CHECK_FALSE(res.result.contains("order_qubit"));
    CHECK_FALSE(res.result.contains("sweep"));
    CHECK_FALSE(res.result.contains("lightcones"));

    PipelineOverrides bad;
    bad.stages = {"nonsense"};
    CHECK_THROWS_AS(run_pipeline(cfg, bad), ConfigError);
}

TEST_CASE("pipeline runs align, lightcones and a short sweep end to end") {
    RunConfig cfg = parse_config_text(kSwitchConfig);
    PipelineOverrides ov;
    ov.stages = {"verdict", "align", "lightcones", "sweep"};
    ov.trials = 3;
    ov.seed = 11;
    const PipelineResult res = run_pipeline(cfg, ov);
    const json& r = res.result;

    CHECK(r["alignment"]["applied"] == true);
    CHECK(r["alignment"]["max_event_mismatch"].get<double>() < 1e-7);
    REQUIRE(r.contains("lightcones"));
    for (const json& rep : r["lightcones"]) {
        CHECK(rep["lightcone_definite"] == true);
        CHECK(rep["deviation_a"].get<double>() < 1e-8);
        CHECK(rep["deviation_b"].get<double>() < 1e-8);
    }
    CHECK(r["lightcones_product"] == -1);
    CHECK(r["sweep"]["trials"] == 3);
    CHECK(r["sweep"]["passes"] == 3);
}

TEST_CASE("pipeline output is deterministic modulo the timestamp") {
    RunConfig cfg = parse_config_text(kSwitchConfig);
    PipelineOverrides ov;
    ov.stages = {"verdict", "sweep", "protocol"};
    ov.trials = 4;
    ov.seed = 123;
    const json first = strip_timestamp(run_pipeline(cfg, ov).result);
    const json second = strip_timestamp(run_pipeline(cfg, ov).result);
    CHECK(first.dump() == second.dump());
}

TEST_CASE("csv artifacts carry the documented headers") {
    RunConfig cfg = parse_config_text(kSwitchConfig);
    const PipelineResult res = run_pipeline(cfg);
    CHECK(res.worldlines_csv.rfind("branch,curve,lambda,x0,x1\n", 0) == 0);
    CHECK(res.bloch_csv.rfind("x,y,z,class\n", 0) == 0);
    // 2 branches x 3 curves x 201 samples + header
    size_t lines = 0;
    for (char c : res.worldlines_csv) lines += (c == '\n');
    CHECK(lines == 1 + 2 * 3 * 201);
    CHECK(res.bloch_csv.find("pure_indefinite") != std::string::npos);
}
