#pragma once

#include "ico/causal_order.hpp"

namespace ico {

// Gravitational switch: a mass sits next to lab 1 in branch A and next to
// lab 2 in branch B. Both labs interact with the test particle when their
// own clock reads sigma_star; the branch's deep-field lab runs slow, so the
// visiting order of the (shared) labs flips between the branches. Branch B's
// waypoint times are Newton-calibrated against the proper-time integrator so
// both branches share the crossing proper times tau1*/tau2* exactly.
struct GravitationalSwitchParams {
    double soft = 0.05;
    double lab_x = 1.0;        // labs at +-lab_x
    double sigma_star = 60.0;  // shared local-clock trigger
    double start_offset = 1.0; // gamma0 starts at -+(lab_x + start_offset)
    double lab_t_max = 70.0;
    double tail_dt = 3.0;      // coordinate-time length of the outgoing leg
};

BranchedScenario gravitational_switch(double mass, const GravitationalSwitchParams& params = {},
                                      std::complex<double> alpha = {M_SQRT1_2, 0},
                                      std::complex<double> beta = {M_SQRT1_2, 0},
                                      const NumericPolicy& policy = {});

// Optical-switch analogue: one Minkowski metric in both branches, the test
// particle sweeps past the two static labs in opposite spatial directions.
struct SuperposedPathsParams {
    double lab_x = 1.0;
    double span_t = 6.0; // gamma0 runs over t in [0, span_t]
    double reach = 2.0;  // gamma0 sweeps from +-reach to -+reach
    bool same_route = false; // degenerate variant: both branches share one path
};

BranchedScenario superposed_paths_switch(const SuperposedPathsParams& params = {},
                                         std::complex<double> alpha = {M_SQRT1_2, 0},
                                         std::complex<double> beta = {M_SQRT1_2, 0},
                                         const NumericPolicy& policy = {});

// Control case: branches differ (flat versus weak-field metric, recalibrated
// path) but share the causal order, s^A = s^B = +1.
struct DefiniteControlParams {
    enum class Variant { PerturbedMetric, IdenticalBranches };
    Variant variant = Variant::PerturbedMetric;
    double mass = 0.002;
    double soft = 0.05;
};

BranchedScenario definite_control(const DefiniteControlParams& params = {},
                                  std::complex<double> alpha = {M_SQRT1_2, 0},
                                  std::complex<double> beta = {M_SQRT1_2, 0},
                                  const NumericPolicy& policy = {});

// Newton adjustment of a lab-to-lab waypoint time so that the proper time of
// the (piecewise-linear) path at the waypoint hits `tau_target`. The path
// runs through `prefix` waypoints and then to (t, x_target); only t varies.
double calibrate_waypoint_time(const MetricField& metric, const std::vector<Vec>& prefix,
                               double x_target, double tau_target, double t_guess,
                               double rel_tol = 1e-9);

} // namespace ico
