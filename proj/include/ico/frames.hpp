#pragma once

#include <array>

#include "ico/causal_order.hpp"

namespace ico {

// Metric data at one aligned event point, per branch.
struct LightconeReport {
    Vec point;
    Mat metric_at_point_a, metric_at_point_b;
    double deviation_a = 0, deviation_b = 0; // max-abs entry of g - eta
    bool lightcone_definite = false;
};

// Linear map x -> L (x - p) + p built from the eigendecomposition of g(p),
// so that the pushforward metric equals eta at p. Orientation preserving:
// no time reflection, det L > 0. Throws ScenarioError on degenerate metrics.
Diffeomorphism minkowski_normalizer_at(const MetricField& g, const Vec& p);

struct LightconeOptions {
    double radius = -1.0;    // <= 0: a quarter of the event separation
    double eps_mink = 1e-8;  // definiteness threshold on max-abs(g - eta)
    // Also cancel the metric's first derivatives at the point via a
    // quadratic normal-coordinate correction.
    bool flatten_first_derivatives = false;
};

struct LightconeOutcome {
    BranchedScenario scenario;
    std::array<LightconeReport, 2> reports; // events 1 and 2
};

// Requires an aligned scenario (event points shared across branches).
// Applies bump-localized Minkowski normalizers on disjoint balls around the
// two event points, per branch, and reports the resulting metric deviations.
LightconeOutcome make_lightcones_definite(const BranchedScenario& sc,
                                          const LightconeOptions& opt = {},
                                          const NumericPolicy& policy = {});

// Max-abs first derivative of the metric at p (central differences), used to
// verify the optional flattening.
double metric_first_derivative_scale(const MetricField& g, const Vec& p, double step = 1e-5);

} // namespace ico
