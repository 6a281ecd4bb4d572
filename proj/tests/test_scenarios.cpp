#include <cmath>

#include "doctest.h"
#include "ico/errors.hpp"
#include "ico/scenarios.hpp"
#include "support/oracles.hpp"

using namespace ico;

TEST_CASE("superposed paths switch: closed-form crossing times and verdict") {
    const BranchedScenario sc = superposed_paths_switch();
    // sweep speed 2/3: tau = t sqrt(5)/3, crossings at t = 1.5 and 4.5
    const double tau1 = std::sqrt(5.0) / 2.0;
    const double tau2 = 3.0 * std::sqrt(5.0) / 2.0;
    CHECK(sc.branch_a.event1.tau == doctest::Approx(tau1).epsilon(1e-9));
    CHECK(sc.branch_a.event2.tau == doctest::Approx(tau2).epsilon(1e-9));
    CHECK(sc.branch_b.event1.tau == doctest::Approx(tau2).epsilon(1e-9));
    CHECK(sc.branch_b.event2.tau == doctest::Approx(tau1).epsilon(1e-9));
    CHECK(sc.branch_a.s == +1);
    CHECK(sc.branch_b.s == -1);
    CHECK(order_product(sc) == -1);
}

TEST_CASE("superposed paths switch: same route degenerates to definite order") {
    SuperposedPathsParams p;
    p.same_route = true;
    CHECK(order_product(superposed_paths_switch(p)) == +1);
}

TEST_CASE("superposed paths switch: globally boosted copies give the same verdict") {
    const BranchedScenario sc = superposed_paths_switch();
    const Diffeomorphism boost = boost_diffeo(2, 0.45);
    const BranchedScenario boosted = apply_quantum_diffeo(sc, boost, boost);
    CHECK(order_product(boosted) == -1);
    CHECK(boosted.branch_a.event1.tau == doctest::Approx(sc.branch_a.event1.tau).epsilon(1e-8));
    CHECK(boosted.branch_b.event2.tau == doctest::Approx(sc.branch_b.event2.tau).epsilon(1e-8));
}

TEST_CASE("gravitational switch: defaults produce an indefinite verdict") {
    const BranchedScenario sc = gravitational_switch(0.003);
    CHECK(order_product(sc) == -1);
    // mass next to lab 1 delays it, so branch A meets lab 2 first
    CHECK(sc.branch_a.s == -1);
    CHECK(sc.branch_b.s == +1);
    // timing idealization holds tightly for the mirror-symmetric defaults
    CHECK(std::min(sc.branch_a.event1.tau, sc.branch_a.event2.tau) ==
          doctest::Approx(std::min(sc.branch_b.event1.tau, sc.branch_b.event2.tau))
              .epsilon(1e-9));
}

TEST_CASE("gravitational switch: taus match the independent Simpson oracle") {
    const BranchedScenario sc = gravitational_switch(0.003);
    const BranchConfig& a = sc.branch_a;
    const double tau1_oracle =
        oracle::proper_time_simpson(a.gamma0, a.metric, a.gamma0.lambda_min, a.event1.lambda0);
    const double tau2_oracle =
        oracle::proper_time_simpson(a.gamma0, a.metric, a.gamma0.lambda_min, a.event2.lambda0);
    CHECK(a.event1.tau == doctest::Approx(tau1_oracle).epsilon(1e-9));
    CHECK(a.event2.tau == doctest::Approx(tau2_oracle).epsilon(1e-9));

    // the slow lab's trigger: its clock rate is the closed-form sqrt(1+2phi)
    const double rate_slow = std::sqrt(1.0 - 2.0 * 0.003 / 0.05);
    const double t_slow = 60.0 / rate_slow;
    CHECK(std::max(a.event1.lambda0, a.event2.lambda0) ==
          doctest::Approx(t_slow).epsilon(1e-9));
}

TEST_CASE("gravitational switch: zero mass has no order difference and is rejected") {
    CHECK_THROWS_WITH_AS(gravitational_switch(0.0), doctest::Contains("degenerate"),
                         ScenarioError);
}

TEST_CASE("gravitational switch: the order split grows monotonically with the mass") {
    double previous = 0.0;
    for (double mass : {0.002, 0.003, 0.004}) {
        const BranchedScenario sc = gravitational_switch(mass);
        const double split = std::fabs(sc.branch_a.delta_tau - sc.branch_b.delta_tau);
        CHECK(split > previous);
        previous = split;
    }
}

TEST_CASE("definite control: perturbed metric, same order, matched crossing times") {
    const BranchedScenario sc = definite_control();
    CHECK(order_product(sc) == +1);
    CHECK(sc.branch_a.s == +1);
    // branch A crossing times are exact closed forms on the flat metric
    CHECK(sc.branch_a.event1.tau == doctest::Approx(std::sqrt(3.0)).epsilon(1e-9));
    CHECK(sc.branch_a.event2.tau ==
          doctest::Approx(std::sqrt(3.0) + std::sqrt(5.0)).epsilon(1e-9));
    // branch B was calibrated against its weak-field metric
    CHECK(sc.branch_b.event1.tau == doctest::Approx(sc.branch_a.event1.tau).epsilon(1e-8));
    CHECK(sc.branch_b.event2.tau == doctest::Approx(sc.branch_a.event2.tau).epsilon(1e-8));
    // and its waypoints genuinely moved
    CHECK(sc.branch_b.event1.lambda0 > sc.branch_a.event1.lambda0 + 1e-5);
}

TEST_CASE("definite control: identical branches variant") {
    const BranchedScenario sc =
        definite_control({DefiniteControlParams::Variant::IdenticalBranches});
    CHECK(order_product(sc) == +1);
    CHECK(sc.branch_a.event1.tau == doctest::Approx(sc.branch_b.event1.tau));
}

TEST_CASE("scenario parameter guards") {
    SuperposedPathsParams inside;
    inside.reach = 0.5; // sweep never reaches past the labs
    CHECK_THROWS_AS(superposed_paths_switch(inside), ConfigError);

    SuperposedPathsParams fast;
    fast.reach = 4.0;
    fast.span_t = 6.0; // needs speed 4/3
    CHECK_THROWS_AS(superposed_paths_switch(fast), ConfigError);

    CHECK_THROWS_AS(gravitational_switch(-0.001), ConfigError);
    CHECK_THROWS_AS(gravitational_switch(0.006), ConfigError); // outside weak-field validity
}

TEST_CASE("calibrate_waypoint_time hits proper-time targets on curved metrics") {
    const MetricField g = weak_field_metric(2, 0.004, 0.05, Vec{0.0});
    const std::vector<Vec> prefix = {Vec{0.0, 2.0}};
    const double target = 2.4;
    const double t = calibrate_waypoint_time(g, prefix, 0.0, target, 2.5);
    std::vector<Vec> pts = prefix;
    pts.push_back(Vec{t, 0.0});
    const Worldline path = piecewise_linear_worldline(pts, CurveRole::TestParticle);
    CHECK(oracle::proper_time_simpson(path, g, 0.0, t) ==
          doctest::Approx(target).epsilon(1e-8));
}

TEST_CASE("both switch constructors expose the same observable content") {
    const BranchedScenario grav = gravitational_switch(0.003);
    const BranchedScenario paths = superposed_paths_switch();
    CHECK(order_product(grav) == order_product(paths));
}
