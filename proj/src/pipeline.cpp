#include "ico/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "ico/errors.hpp"
#include "ico/frames.hpp"
#include "ico/quantum.hpp"

namespace ico {

using nlohmann::json;

namespace {

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

json branch_json(const BranchConfig& b) {
    return json{{"tau1", b.event1.tau}, {"tau2", b.event2.tau}, {"s", b.s}};
}

json matrix_json(const Mat& m) {
    json rows = json::array();
    for (int i = 0; i < m.n; ++i) {
        json row = json::array();
        for (int j = 0; j < m.n; ++j) row.push_back(m.at(i, j));
        rows.push_back(row);
    }
    return rows;
}

json point_json(const Vec& p) {
    json a = json::array();
    for (int i = 0; i < p.n; ++i) a.push_back(p[i]);
    return a;
}

void append_curve_csv(std::string& csv, const char* branch, const Worldline& w, int samples) {
    char line[256];
    for (int k = 0; k <= samples; ++k) {
        const double lambda = w.lambda_min + (w.lambda_max - w.lambda_min) * k / samples;
        const Vec p = w.position(lambda);
        int len = std::snprintf(line, sizeof(line), "%s,%s,%.17g", branch,
                                curve_role_name(w.role), lambda);
        for (int i = 0; i < p.n; ++i)
            len += std::snprintf(line + len, sizeof(line) - len, ",%.17g", p[i]);
        csv.append(line, len);
        csv.push_back('\n');
    }
}

bool stage_requested(const std::vector<std::string>& stages, const char* name) {
    for (const std::string& s : stages)
        if (s == name || s == "all") return true;
    return false;
}

} // namespace

PipelineResult run_pipeline(const RunConfig& cfg, const PipelineOverrides& overrides) {
    std::vector<std::string> stages =
        !overrides.stages.empty() ? overrides.stages
                                  : (!cfg.stages.empty() ? cfg.stages
                                                         : std::vector<std::string>{"all"});
    static const char* kKnown[] = {"all", "verdict", "align", "lightcones", "sweep", "protocol"};
    for (const std::string& s : stages)
        if (std::find_if(std::begin(kKnown), std::end(kKnown),
                         [&](const char* k) { return s == k; }) == std::end(kKnown))
            throw ConfigError("pipeline: unknown stage '" + s + "'");

    const int trials = overrides.trials >= 0 ? overrides.trials : cfg.sweep_trials;
    const std::uint64_t seed =
        overrides.seed >= 0 ? static_cast<std::uint64_t>(overrides.seed) : cfg.seed;

    const BranchedScenario scenario = build_configured_scenario(cfg);

    json out;
    out["schema"] = "icolab/1";
    out["timestamp"] = iso_timestamp();
    out["config"] = {{"scenario", {{"name", cfg.scenario_name}, {"params", cfg.scenario_params}}},
                     {"alpha", {cfg.alpha.real(), cfg.alpha.imag()}},
                     {"beta", {cfg.beta.real(), cfg.beta.imag()}},
                     {"seed", seed},
                     {"trials", trials},
                     {"stages", stages}};

    const int product = order_product(scenario);

    // verdict (always included: every other stage reads it)
    {
        json co;
        co["branch_a"] = branch_json(scenario.branch_a);
        co["branch_b"] = branch_json(scenario.branch_b);
        co["product"] = product;
        co["verdict"] = (product == -1) ? "indefinite" : "definite";
        out["causal_order"] = co;
        if (product == -1) {
            const ReparametrizationReport rep = reparametrization_no_go_check(scenario);
            out["reparametrization"] = {{"delta", rep.delta},
                                        {"tau_star", rep.tau_star},
                                        {"tau2_a", rep.tau2_a},
                                        {"tau2_b", rep.tau2_b_shifted},
                                        {"straddles", rep.straddles}};
        }
    }

    BranchedScenario aligned = scenario;
    bool have_aligned = false;
    if (stage_requested(stages, "align") || stage_requested(stages, "lightcones")) {
        const AlignmentMaps maps = align_events(scenario);
        aligned = apply_quantum_diffeo(scenario, maps.phi_a, maps.phi_b, cfg.numerics);
        const double mismatch =
            std::max(norm(aligned.branch_a.event1.point - aligned.branch_b.event1.point),
                     norm(aligned.branch_a.event2.point - aligned.branch_b.event2.point));
        if (mismatch > 1e-7)
            throw ScenarioError("pipeline: alignment postcondition failed");
        if (order_product(aligned) != product)
            throw ScenarioError("pipeline: alignment changed the order product");
        have_aligned = true;
        out["alignment"] = {{"applied", true},
                            {"max_event_mismatch", mismatch},
                            {"phi_b", maps.phi_b.describe},
                            {"event_points",
                             {point_json(aligned.branch_a.event1.point),
                              point_json(aligned.branch_a.event2.point)}}};
    }

    if (stage_requested(stages, "lightcones")) {
        const LightconeOutcome lc = make_lightcones_definite(aligned, {}, cfg.numerics);
        json reports = json::array();
        for (const LightconeReport& rep : lc.reports)
            reports.push_back({{"point", point_json(rep.point)},
                               {"metric_a", matrix_json(rep.metric_at_point_a)},
                               {"metric_b", matrix_json(rep.metric_at_point_b)},
                               {"deviation_a", rep.deviation_a},
                               {"deviation_b", rep.deviation_b},
                               {"lightcone_definite", rep.lightcone_definite}});
        out["lightcones"] = reports;
        out["lightcones_product"] = order_product(lc.scenario);
    }

    if (stage_requested(stages, "sweep")) {
        // no timing fields here: result.json stays bit-identical for a fixed
        // config and seed, modulo the timestamp
        const SweepResult sw = run_invariance_sweep(scenario, trials, seed, cfg.numerics);
        out["sweep"] = {{"trials", sw.trials},
                        {"passes", sw.passes},
                        {"seed", sw.seed},
                        {"max_rel_tau_deviation", sw.max_rel_tau_dev},
                        {"s_constant", sw.s_constant},
                        {"product_constant", sw.product_constant}};
        if (sw.passes != sw.trials)
            out["sweep"]["first_failure"] = sw.first_failure;
    }

    std::string bloch_csv = "x,y,z,class\n";
    if (stage_requested(stages, "protocol")) {
        const double omega = omega_for_pi(scenario);
        const ProtocolTrace tr = run_switch_protocol_trace(scenario, omega);
        // Branch A's sign decides which declared amplitude rides on |s=+1>.
        const Complex amp_plus = scenario.branch_a.s > 0 ? scenario.alpha : scenario.beta;
        const Complex amp_minus = scenario.branch_a.s > 0 ? scenario.beta : scenario.alpha;
        Postselection ps;
        if (product == -1)
            ps = postselect_order_qubit(tr.referee_out, amp_plus, amp_minus);
        else
            ps = postselect_order_qubit(tr.referee_out);
        const BlochVector b = tomography(ps.order_qubit);
        const OrderClass cls = classify_order(b);
        out["order_qubit"] = {{"bloch", {b.x, b.y, b.z}},
                              {"class", order_class_name(cls)},
                              {"postselect_prob", ps.probability}};
        out["protocol"] = {{"tau1_star", tr.tau1_star},
                           {"tau2_star", tr.tau2_star},
                           {"omega", tr.omega},
                           {"spin_orthogonal", tr.spin_orthogonal}};
        char line[128];
        std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%s\n", b.x, b.y, b.z,
                      order_class_name(cls));
        bloch_csv += line;
    }

    PipelineResult res;
    res.result = std::move(out);
    res.bloch_csv = std::move(bloch_csv);

    std::string csv = "branch,curve,lambda";
    for (int i = 0; i < scenario.branch_a.metric.dim; ++i)
        csv += ",x" + std::to_string(i);
    csv += "\n";
    const BranchedScenario& plotted = have_aligned ? aligned : scenario;
    for (const Worldline* w :
         {&plotted.branch_a.gamma0, &plotted.branch_a.gamma1, &plotted.branch_a.gamma2})
        append_curve_csv(csv, "a", *w, 200);
    for (const Worldline* w :
         {&plotted.branch_b.gamma0, &plotted.branch_b.gamma1, &plotted.branch_b.gamma2})
        append_curve_csv(csv, "b", *w, 200);
    res.worldlines_csv = std::move(csv);
    return res;
}

} // namespace ico
