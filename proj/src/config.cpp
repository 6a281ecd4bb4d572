#include "ico/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "ico/errors.hpp"
#include "ico/scenarios.hpp"

namespace ico {

using nlohmann::json;

namespace {

std::complex<double> complex_from(const json& j, const char* what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    throw ConfigError(std::string("config: ") + what + " must be a number or [re, im]");
}

Vec vec_from(const json& j, const char* what, int expected = -1) {
    if (!j.is_array() || j.empty() || j.size() > kMaxDim)
        throw ConfigError(std::string("config: ") + what + " must be a short number array");
    Vec v = Vec::zero(static_cast<int>(j.size()));
    for (size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ConfigError(std::string("config: ") + what + " must contain numbers");
        v[static_cast<int>(i)] = j[i].get<double>();
    }
    if (expected >= 0 && v.n != expected)
        throw ConfigError(std::string("config: ") + what + " has the wrong dimension");
    return v;
}

double num_or(const json& obj, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number()) throw ConfigError(std::string("config: ") + key + " must be a number");
    return obj[key].get<double>();
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: malformed JSON (") + e.what() + ")");
    }
    if (!root.is_object()) throw ConfigError("config: top level must be an object");

    RunConfig cfg;
    if (!root.contains("scenario") || !root["scenario"].is_object() ||
        !root["scenario"].contains("name"))
        throw ConfigError("config: missing scenario/{name, params}");
    cfg.scenario_name = root["scenario"]["name"].get<std::string>();
    cfg.scenario_params = root["scenario"].value("params", json::object());

    if (root.contains("amplitudes")) {
        const json& amp = root["amplitudes"];
        cfg.alpha = complex_from(amp.value("alpha", json::array({M_SQRT1_2, 0.0})), "alpha");
        cfg.beta = complex_from(amp.value("beta", json::array({M_SQRT1_2, 0.0})), "beta");
        const double n2 = std::norm(cfg.alpha) + std::norm(cfg.beta);
        if (std::fabs(n2 - 1.0) > 1e-6)
            throw ConfigError("config: |alpha|^2 + |beta|^2 deviates from 1 by more than 1e-6");
        const double n = std::sqrt(n2);
        cfg.alpha /= n;
        cfg.beta /= n;
    }

    if (root.contains("numerics")) {
        const json& num = root["numerics"];
        cfg.numerics.quad_rel_tol = num_or(num, "quad_rel_tol", cfg.numerics.quad_rel_tol);
        cfg.numerics.cross_tol = num_or(num, "cross_tol", cfg.numerics.cross_tol);
        if (num.contains("seed")) cfg.seed = num["seed"].get<std::uint64_t>();
        if (num.contains("trials")) cfg.sweep_trials = num["trials"].get<int>();
        if (cfg.numerics.quad_rel_tol <= 0 || cfg.numerics.cross_tol <= 0)
            throw ConfigError("config: tolerances must be positive");
    }

    if (root.contains("stages")) {
        if (!root["stages"].is_array()) throw ConfigError("config: stages must be an array");
        for (const json& s : root["stages"]) cfg.stages.push_back(s.get<std::string>());
    }

    cfg.transform = root.value("transform", json());
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

MetricField metric_from_spec(const json& spec, int dim) {
    if (!spec.is_object() || !spec.contains("family"))
        throw ConfigError("config: metric spec needs a family name");
    const std::string family = spec["family"].get<std::string>();
    if (family == "minkowski") return minkowski_metric(dim);
    if (family == "weak_field") {
        const double mass = num_or(spec, "mass", 0.002);
        const double soft = num_or(spec, "soft", 0.05);
        const Vec center = vec_from(spec.value("center", json::array({0.0})), "metric center",
                                    dim - 1);
        return weak_field_metric(dim, mass, soft, center);
    }
    throw ConfigError("config: unknown metric family '" + family + "'");
}

Worldline worldline_from_spec(const json& spec, int dim, CurveRole role) {
    if (!spec.is_object() || !spec.contains("family"))
        throw ConfigError("config: worldline spec needs a family name");
    const std::string family = spec["family"].get<std::string>();

    auto range_of = [&](const json& s) {
        const json r = s.value("range", json::array({0.0, 1.0}));
        if (!r.is_array() || r.size() != 2) throw ConfigError("config: worldline range must be [t0, t1]");
        return std::pair<double, double>(r[0].get<double>(), r[1].get<double>());
    };

    if (family == "static") {
        const auto [t0, t1] = range_of(spec);
        return static_worldline(dim, vec_from(spec["x"], "static x", dim - 1), t0, t1, role);
    }
    if (family == "uniform") {
        const auto [t0, t1] = range_of(spec);
        return uniform_worldline(dim, vec_from(spec["start"], "uniform start", dim - 1),
                                 vec_from(spec["velocity"], "uniform velocity", dim - 1), t0, t1,
                                 role);
    }
    if (family == "piecewise_linear") {
        if (!spec.contains("waypoints") || !spec["waypoints"].is_array())
            throw ConfigError("config: piecewise_linear needs a waypoint list");
        std::vector<Vec> pts;
        for (const json& w : spec["waypoints"]) pts.push_back(vec_from(w, "waypoint", dim));
        return piecewise_linear_worldline(pts, role);
    }
    if (family == "sinusoidal") {
        if (dim != 2) throw ConfigError("config: sinusoidal worldlines are 1+1 dimensional");
        const auto [t0, t1] = range_of(spec);
        return sinusoidal_worldline(num_or(spec, "x0", 0.0), num_or(spec, "amp", 0.1),
                                    num_or(spec, "freq", 1.0), num_or(spec, "phase", 0.0), t0, t1,
                                    role);
    }
    throw ConfigError("config: unknown worldline family '" + family + "'");
}

Diffeomorphism diffeo_from_spec(const json& spec, int dim) {
    if (!spec.is_object() || !spec.contains("family"))
        throw ConfigError("config: diffeomorphism spec needs a family name");
    const std::string family = spec["family"].get<std::string>();
    if (family == "identity") return identity_diffeo(dim);
    if (family == "translation")
        return translation_diffeo(vec_from(spec["offset"], "translation offset", dim));
    if (family == "boost")
        return boost_diffeo(dim, num_or(spec, "v", 0.3),
                            static_cast<int>(num_or(spec, "axis", 1)));
    if (family == "sin_shear")
        return sin_shear_diffeo(dim, static_cast<int>(num_or(spec, "target_axis", 0)),
                                static_cast<int>(num_or(spec, "source_axis", 1)),
                                num_or(spec, "amp", 0.1), num_or(spec, "freq", 1.0),
                                num_or(spec, "phase", 0.0));
    if (family == "bump_translation")
        return bump_translation(vec_from(spec["center"], "bump center", dim),
                                vec_from(spec["offset"], "bump offset", dim),
                                num_or(spec, "radius", 1.0));
    if (family == "bump_linear") {
        const json& rows = spec["matrix"];
        if (!rows.is_array() || static_cast<int>(rows.size()) != dim)
            throw ConfigError("config: bump_linear matrix must be dim x dim");
        Mat m = Mat::zero(dim);
        for (int i = 0; i < dim; ++i) {
            const Vec row = vec_from(rows[i], "matrix row", dim);
            for (int j = 0; j < dim; ++j) m.at(i, j) = row[j];
        }
        const Vec center = vec_from(spec["center"], "bump center", dim);
        return make_bump_localized(linear_diffeo(m, center, "core"), center,
                                   num_or(spec, "radius", 1.0));
    }
    throw ConfigError("config: unknown diffeomorphism family '" + family + "'");
}

Diffeomorphism diffeo_chain_from_spec(const json& list, int dim) {
    if (!list.is_array()) throw ConfigError("config: transform lists must be arrays");
    Diffeomorphism phi = identity_diffeo(dim);
    bool have = false;
    for (const json& spec : list) {
        const Diffeomorphism next = diffeo_from_spec(spec, dim);
        phi = have ? compose(next, phi) : next;
        have = true;
    }
    return phi;
}

BranchedScenario build_configured_scenario(const RunConfig& cfg) {
    const json& p = cfg.scenario_params;
    BranchedScenario sc;

    if (cfg.scenario_name == "gravitational_switch") {
        GravitationalSwitchParams gp;
        gp.soft = num_or(p, "soft", gp.soft);
        gp.lab_x = num_or(p, "lab_x", gp.lab_x);
        gp.sigma_star = num_or(p, "sigma_star", gp.sigma_star);
        gp.start_offset = num_or(p, "start_offset", gp.start_offset);
        gp.lab_t_max = num_or(p, "lab_t_max", gp.lab_t_max);
        gp.tail_dt = num_or(p, "tail_dt", gp.tail_dt);
        sc = gravitational_switch(num_or(p, "mass", 0.003), gp, cfg.alpha, cfg.beta,
                                  cfg.numerics);
    } else if (cfg.scenario_name == "superposed_paths_switch") {
        SuperposedPathsParams sp;
        sp.lab_x = num_or(p, "lab_x", sp.lab_x);
        sp.span_t = num_or(p, "span_t", sp.span_t);
        sp.reach = num_or(p, "reach", sp.reach);
        sp.same_route = p.value("same_route", false);
        sc = superposed_paths_switch(sp, cfg.alpha, cfg.beta, cfg.numerics);
    } else if (cfg.scenario_name == "definite_control") {
        DefiniteControlParams dp;
        const std::string variant = p.value("variant", std::string("perturbed_metric"));
        if (variant == "perturbed_metric")
            dp.variant = DefiniteControlParams::Variant::PerturbedMetric;
        else if (variant == "identical")
            dp.variant = DefiniteControlParams::Variant::IdenticalBranches;
        else
            throw ConfigError("config: unknown definite_control variant '" + variant + "'");
        dp.mass = num_or(p, "mass", dp.mass);
        dp.soft = num_or(p, "soft", dp.soft);
        sc = definite_control(dp, cfg.alpha, cfg.beta, cfg.numerics);
    } else if (cfg.scenario_name == "custom") {
        const int dim = static_cast<int>(num_or(p, "dim", 2));
        if (dim < 2 || dim > kMaxDim) throw ConfigError("config: dim must be 2, 3 or 4");
        auto branch_of = [&](const char* key) {
            if (!p.contains(key)) throw ConfigError(std::string("config: custom scenario needs ") + key);
            const json& b = p[key];
            return build_branch(metric_from_spec(b.at("metric"), dim),
                                worldline_from_spec(b.at("gamma0"), dim, CurveRole::TestParticle),
                                worldline_from_spec(b.at("gamma1"), dim, CurveRole::System1),
                                worldline_from_spec(b.at("gamma2"), dim, CurveRole::System2),
                                cfg.numerics);
        };
        sc = make_scenario(branch_of("branch_a"), branch_of("branch_b"), cfg.alpha, cfg.beta);
    } else {
        throw ConfigError("config: unknown scenario name '" + cfg.scenario_name + "'");
    }

    if (!cfg.transform.is_null()) {
        if (!cfg.transform.is_object())
            throw ConfigError("config: transform must hold branch_a/branch_b lists");
        const int dim = sc.branch_a.metric.dim;
        const Diffeomorphism pa =
            diffeo_chain_from_spec(cfg.transform.value("branch_a", json::array()), dim);
        const Diffeomorphism pb =
            diffeo_chain_from_spec(cfg.transform.value("branch_b", json::array()), dim);
        sc = apply_quantum_diffeo(sc, pa, pb, cfg.numerics);
    }
    return sc;
}

} // namespace ico
