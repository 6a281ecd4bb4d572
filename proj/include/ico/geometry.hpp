#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "ico/linalg.hpp"

namespace ico {

// A chart point. All manifolds here are R^D with a single global chart,
// coordinates (t, x, ...) in geometric units with c = 1.
using SpacetimePoint = Vec;

// A Lorentzian metric field g_{mu nu}(x), evaluable anywhere on the chart.
// Fields are immutable after construction and safe to share across threads.
struct MetricField {
    int dim = 0;
    std::function<Mat(const Vec&)> eval;

    Mat operator()(const Vec& p) const { return eval(p); }
};

MetricField minkowski_metric(int dim);

// Weak-field metric g_00 = -(1 + 2 phi), spatial part flat, with the softened
// potential phi(x) = -mass / (|x_spatial - center| + soft).
MetricField weak_field_metric(int dim, double mass, double soft, const Vec& center_spatial);

// A smooth invertible chart map with forward/inverse and Jacobian of the
// forward map. Missing closures fall back to damped Newton (inverse) and
// central differences with step 1e-6 (Jacobian).
struct Diffeomorphism {
    int dim = 0;
    std::function<Vec(const Vec&)> forward_fn;
    std::function<Vec(const Vec&)> inverse_fn;  // optional
    std::function<Mat(const Vec&)> jacobian_fn; // optional
    std::string describe = "map";

    Vec forward(const Vec& p) const;
    Vec inverse(const Vec& p) const;
    Mat jacobian(const Vec& p) const;
};

Diffeomorphism identity_diffeo(int dim);
Diffeomorphism translation_diffeo(const Vec& offset);
// x -> M (x - anchor) + anchor
Diffeomorphism linear_diffeo(const Mat& m, const Vec& anchor, const std::string& name = "linear");
// Lorentz boost with velocity v along spatial axis `axis` (1-based chart index).
Diffeomorphism boost_diffeo(int dim, double v, int axis = 1);
// Triangular shear x_target += amp * sin(freq * x_source + phase); exactly invertible.
Diffeomorphism sin_shear_diffeo(int dim, int target_axis, int source_axis, double amp,
                                double freq, double phase);
// outer after inner
Diffeomorphism compose(const Diffeomorphism& outer, const Diffeomorphism& inner);

// C1 bump profile: w(0) = 1, w(u >= 1) = 0, w'(0) = w'(1) = 0.
double bump_weight(double u);
double bump_weight_deriv(double u);
// sup_u |w'(u)| used for a-priori invertibility bounds of bump deformations.
inline constexpr double kBumpMaxSlope = 1.539600717839002; // 8 / (3 sqrt 3)

// Interpolates phi_core towards the identity so the result acts only inside
// the open ball |p - center| < radius. Requires phi_core(center) = center.
// Construction certifies invertibility on a sample grid and throws
// ConstructionError when that fails.
Diffeomorphism make_bump_localized(const Diffeomorphism& phi_core, const Vec& center,
                                   double radius);

// Moves `center` by `offset`, identity outside the ball of given radius.
Diffeomorphism bump_translation(const Vec& center, const Vec& offset, double radius);

// (phi_* g)(y) = K^T g(phi^{-1}(y)) K with K = J_phi(phi^{-1}(y))^{-1}.
MetricField pushforward_metric(const Diffeomorphism& phi, const MetricField& g);

// Round-trip and Jacobian-regularity certification on explicit sample points.
void check_diffeo_on_samples(const Diffeomorphism& phi, const std::vector<Vec>& points,
                             double roundtrip_tol = 1e-9, double det_floor = 1e-12);

// Axis-aligned bounding box of chart points, used to place randomized maps.
struct ChartBox {
    Vec lo, hi;

    void expand(const Vec& p);
    void inflate(double margin);
    double scale() const;
    Vec sample(std::mt19937_64& rng) const;
};

} // namespace ico
