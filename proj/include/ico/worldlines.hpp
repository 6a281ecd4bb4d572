#pragma once

#include <functional>
#include <vector>

#include "ico/geometry.hpp"

namespace ico {

enum class CurveRole { TestParticle, System1, System2 };
const char* curve_role_name(CurveRole role);

// A parametrized timelike curve gamma(lambda) on [lambda_min, lambda_max].
// `kinks` lists interior parameters where the velocity jumps (piecewise
// curves); integrators split there and the velocity closure stays one-sided.
struct Worldline {
    int dim = 0;
    double lambda_min = 0, lambda_max = 0;
    std::function<Vec(double)> position_fn;
    std::function<Vec(double)> velocity_fn; // optional, falls back to central differences
    std::vector<double> kinks;
    CurveRole role = CurveRole::TestParticle;

    Vec position(double lambda) const;
    Vec velocity(double lambda) const;
};

// Static spatial position, parametrized by coordinate time.
Worldline static_worldline(int dim, const Vec& spatial, double t0, double t1, CurveRole role);
// Constant coordinate velocity, parametrized by coordinate time.
Worldline uniform_worldline(int dim, const Vec& start_spatial, const Vec& velocity_spatial,
                            double t0, double t1, CurveRole role);
// Piecewise-linear through full chart waypoints with strictly increasing time;
// lambda equals coordinate time.
Worldline piecewise_linear_worldline(const std::vector<Vec>& waypoints, CurveRole role);
// x(t) = x0 + amp sin(freq t + phase) on the first spatial axis (dim 2).
Worldline sinusoidal_worldline(double x0, double amp, double freq, double phase, double t0,
                               double t1, CurveRole role);

Worldline pushforward_curve(const Diffeomorphism& phi, const Worldline& gamma);
// eval'(lambda) = eval(lambda - delta); range shifted by delta.
Worldline reparametrize(const Worldline& gamma, double delta);

// tau = integral sqrt(-g_{mu nu} xdot^mu xdot^nu) dlambda over [a, b].
// Throws ScenarioError naming the offending lambda if the curve fails to be
// timelike there.
double proper_time(const Worldline& gamma, const MetricField& g, double lambda_a,
                   double lambda_b, double rel_tol = 1e-9);

struct Coincidence {
    double lambda0 = 0;      // parameter on gamma0
    double lambda_other = 0; // parameter on the system curve
    Vec point;               // gamma0(lambda0)
    double residual = 0;     // chart distance at the solution
    int which_system = 0;    // 1 or 2
};

// All chart-space crossings of gamma0 with gamma_i below `tol`, found by a
// coarse grid scan plus Gauss-Newton refinement, sorted by lambda0 and with
// duplicates within parameter distance 1e-6 merged.
std::vector<Coincidence> detect_coincidences(const Worldline& gamma0, const Worldline& gamma_i,
                                             double tol = 1e-8, int grid = 192);

// True iff g_{mu nu}(p) v0^mu vi^nu < 0 (vi future-pointing relative to v0).
// Both vectors must be timelike at p.
bool orientation_sign(const MetricField& g, const Vec& p, const Vec& v0, const Vec& vi);

// Verifies g(xdot, xdot) < 0 on a parameter grid; throws ScenarioError.
void check_timelike(const Worldline& gamma, const MetricField& g, int samples = 257);

} // namespace ico
