#include "ico/scenarios.hpp"

#include <cmath>
#include <sstream>

#include "ico/errors.hpp"
#include "ico/numerics.hpp"

namespace ico {

namespace {

void require_timing_idealization(const BranchedScenario& sc, double tol = 1e-6) {
    const double a1 = std::min(sc.branch_a.event1.tau, sc.branch_a.event2.tau);
    const double a2 = std::max(sc.branch_a.event1.tau, sc.branch_a.event2.tau);
    const double b1 = std::min(sc.branch_b.event1.tau, sc.branch_b.event2.tau);
    const double b2 = std::max(sc.branch_b.event1.tau, sc.branch_b.event2.tau);
    if (std::fabs(a1 - b1) > tol || std::fabs(a2 - b2) > tol) {
        std::ostringstream os;
        os << "scenario: crossing proper times differ across branches beyond " << tol
           << " ({" << a1 << ", " << a2 << "} vs {" << b1 << ", " << b2 << "})";
        throw ScenarioError(os.str());
    }
}

void normalize_amplitudes(std::complex<double>& alpha, std::complex<double>& beta) {
    const double n = std::sqrt(std::norm(alpha) + std::norm(beta));
    if (!(n > 0.5) || !(n < 2.0))
        throw ConfigError("scenario: amplitudes far from normalizable");
    alpha /= n;
    beta /= n;
}

} // namespace

double calibrate_waypoint_time(const MetricField& metric, const std::vector<Vec>& prefix,
                               double x_target, double tau_target, double t_guess,
                               double rel_tol) {
    // The calibration integrals run tighter than the caller's tolerance so
    // the Newton residual is limited by the root finder, not by quadrature.
    const double quad_tol = std::min(rel_tol, 1e-12);
    const double t_prev = prefix.back()[0];
    auto tau_at = [&](double t) {
        if (t <= t_prev + 1e-9) return -tau_target; // keep Newton on the feasible side
        std::vector<Vec> pts = prefix;
        pts.push_back(Vec{t, x_target});
        const Worldline path = piecewise_linear_worldline(pts, CurveRole::TestParticle);
        return proper_time(path, metric, path.lambda_min, t, quad_tol) - tau_target;
    };
    return newton_scalar(tau_at, t_guess, 1e-9, 60);
}

BranchedScenario gravitational_switch(double mass, const GravitationalSwitchParams& params,
                                      std::complex<double> alpha, std::complex<double> beta,
                                      const NumericPolicy& policy) {
    normalize_amplitudes(alpha, beta);
    const int dim = 2;
    if (mass < 0) throw ConfigError("gravitational_switch: mass must be nonnegative");
    const double lab1_x = params.lab_x;
    const double lab2_x = -params.lab_x;

    // Branch A: mass at lab 1; branch B: mass at lab 2.
    const MetricField g_a =
        mass > 0 ? weak_field_metric(dim, mass, params.soft, Vec{lab1_x}) : minkowski_metric(dim);
    const MetricField g_b =
        mass > 0 ? weak_field_metric(dim, mass, params.soft, Vec{lab2_x}) : minkowski_metric(dim);

    // Static labs run at a fixed proper-time rate; the lab with the mass next
    // to it reaches its trigger reading sigma_star later in coordinate time.
    auto clock_rate = [&](const MetricField& g, double x) {
        const Mat m = g.eval(Vec{0.0, x});
        return std::sqrt(-m.at(0, 0));
    };
    const double t_slow_a = params.sigma_star / clock_rate(g_a, lab1_x);
    const double t_fast_a = params.sigma_star / clock_rate(g_a, lab2_x);

    // The lab-to-lab leg must stay comfortably timelike; at mass -> 0 the
    // visit times coincide and delta_tau vanishes in both branches.
    const double gap = t_slow_a - t_fast_a;
    const double lab_separation = lab1_x - lab2_x;
    const double light_near_lab = std::sqrt(1.0 - 2.0 * mass / params.soft);
    if (gap <= 0 || lab_separation / gap >= 0.85 * light_near_lab) {
        std::ostringstream os;
        os << "gravitational_switch: degenerate causal order, the branch visit times are too "
              "close for a timelike transfer (delta_tau would vanish at mass = "
           << mass << ")";
        throw ScenarioError(os.str());
    }

    const Worldline lab1 =
        static_worldline(dim, Vec{lab1_x}, 0.0, params.lab_t_max, CurveRole::System1);
    const Worldline lab2 =
        static_worldline(dim, Vec{lab2_x}, 0.0, params.lab_t_max, CurveRole::System2);

    const double start_a = lab2_x - params.start_offset;
    auto sweep = [&](double t_first, double t_second, bool upward) {
        const double sgn = upward ? 1.0 : -1.0;
        std::vector<Vec> pts;
        pts.push_back(Vec{0.0, sgn * start_a});
        pts.push_back(Vec{t_first, sgn * lab2_x});
        pts.push_back(Vec{t_second, sgn * lab1_x});
        pts.push_back(Vec{t_second + params.tail_dt, sgn * (lab1_x + params.start_offset)});
        return piecewise_linear_worldline(pts, CurveRole::TestParticle);
    };

    // Branch A visits the fast lab (lab 2) first, then the slow lab (lab 1).
    const Worldline gamma0_a = sweep(t_fast_a, t_slow_a, true);
    const BranchConfig branch_a = build_branch(g_a, gamma0_a, lab1, lab2, policy);
    const double tau1_star = std::min(branch_a.event1.tau, branch_a.event2.tau);
    const double tau2_star = std::max(branch_a.event1.tau, branch_a.event2.tau);

    // Branch B mirrors the sweep (lab 1 first); its waypoint times start from
    // its own clock rule and are refined so the crossing proper times hit
    // tau1*/tau2* measured on branch B's metric.
    const double t_fast_b0 = params.sigma_star / clock_rate(g_b, lab1_x);
    const double t_slow_b0 = params.sigma_star / clock_rate(g_b, lab2_x);
    std::vector<Vec> prefix = {Vec{0.0, -start_a}};
    const double t_first_b =
        calibrate_waypoint_time(g_b, prefix, -lab2_x, tau1_star, t_fast_b0, policy.quad_rel_tol);
    prefix.push_back(Vec{t_first_b, -lab2_x});
    const double t_second_b =
        calibrate_waypoint_time(g_b, prefix, -lab1_x, tau2_star, t_slow_b0, policy.quad_rel_tol);

    const Worldline gamma0_b = sweep(t_first_b, t_second_b, false);
    const BranchConfig branch_b = build_branch(g_b, gamma0_b, lab1, lab2, policy);

    BranchedScenario sc = make_scenario(branch_a, branch_b, alpha, beta);
    if (order_product(sc) != -1)
        throw ScenarioError("gravitational_switch: construction failed to produce indefinite "
                            "causal order");
    require_timing_idealization(sc);
    return sc;
}

BranchedScenario superposed_paths_switch(const SuperposedPathsParams& params,
                                         std::complex<double> alpha, std::complex<double> beta,
                                         const NumericPolicy& policy) {
    normalize_amplitudes(alpha, beta);
    const int dim = 2;
    if (params.reach <= params.lab_x)
        throw ConfigError("superposed_paths_switch: sweep must reach past both labs");
    const MetricField g = minkowski_metric(dim);

    const Worldline lab1 =
        static_worldline(dim, Vec{params.lab_x}, 0.0, params.span_t, CurveRole::System1);
    const Worldline lab2 =
        static_worldline(dim, Vec{-params.lab_x}, 0.0, params.span_t, CurveRole::System2);

    const double speed = 2.0 * params.reach / params.span_t;
    if (speed >= 1.0)
        throw ConfigError("superposed_paths_switch: sweep would be superluminal");

    const Worldline down = uniform_worldline(dim, Vec{params.reach}, Vec{-speed}, 0.0,
                                             params.span_t, CurveRole::TestParticle);
    const Worldline up = uniform_worldline(dim, Vec{-params.reach}, Vec{speed}, 0.0,
                                           params.span_t, CurveRole::TestParticle);

    const BranchConfig branch_a = build_branch(g, down, lab1, lab2, policy);
    const BranchConfig branch_b =
        build_branch(g, params.same_route ? down : up, lab1, lab2, policy);

    BranchedScenario sc = make_scenario(branch_a, branch_b, alpha, beta);
    const int expected = params.same_route ? +1 : -1;
    if (order_product(sc) != expected)
        throw ScenarioError("superposed_paths_switch: unexpected order product");
    require_timing_idealization(sc);
    return sc;
}

BranchedScenario definite_control(const DefiniteControlParams& params,
                                  std::complex<double> alpha, std::complex<double> beta,
                                  const NumericPolicy& policy) {
    normalize_amplitudes(alpha, beta);
    const int dim = 2;
    const MetricField flat = minkowski_metric(dim);
    const Worldline lab1 = static_worldline(dim, Vec{1.0}, 0.0, 8.0, CurveRole::System1);
    const Worldline lab2 = static_worldline(dim, Vec{-1.0}, 0.0, 8.0, CurveRole::System2);

    const std::vector<Vec> route_a = {Vec{0.0, 2.0}, Vec{2.0, 1.0}, Vec{5.0, -1.0},
                                      Vec{6.0, -1.4}};
    const Worldline gamma0_a = piecewise_linear_worldline(route_a, CurveRole::TestParticle);
    const BranchConfig branch_a = build_branch(flat, gamma0_a, lab1, lab2, policy);

    BranchConfig branch_b = branch_a;
    if (params.variant == DefiniteControlParams::Variant::PerturbedMetric) {
        // Same spatial route through a weak field next to lab 1, waypoint
        // times recalibrated so the crossing proper times match branch A.
        const MetricField g_b = weak_field_metric(dim, params.mass, params.soft, Vec{1.0});
        std::vector<Vec> prefix = {Vec{0.0, 2.0}};
        const double t1 = calibrate_waypoint_time(g_b, prefix, 1.0, branch_a.event1.tau, 2.0,
                                                  policy.quad_rel_tol);
        prefix.push_back(Vec{t1, 1.0});
        const double t2 = calibrate_waypoint_time(g_b, prefix, -1.0, branch_a.event2.tau, 5.0,
                                                  policy.quad_rel_tol);
        const std::vector<Vec> route_b = {Vec{0.0, 2.0}, Vec{t1, 1.0}, Vec{t2, -1.0},
                                          Vec{t2 + 1.0, -1.4}};
        branch_b = build_branch(g_b, piecewise_linear_worldline(route_b, CurveRole::TestParticle),
                                lab1, lab2, policy);
    }

    BranchedScenario sc = make_scenario(branch_a, branch_b, alpha, beta);
    if (order_product(sc) != +1)
        throw ScenarioError("definite_control: construction accidentally flipped an order");
    require_timing_idealization(sc);
    return sc;
}

} // namespace ico
