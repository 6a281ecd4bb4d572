#include "ico/frames.hpp"

#include <cmath>

#include "ico/errors.hpp"
#include "ico/numerics.hpp"

namespace ico {

Diffeomorphism minkowski_normalizer_at(const MetricField& g, const Vec& p) {
    const Mat gp = g.eval(p);
    const EigenSym e = eigen_sym(gp);

    int negatives = 0;
    for (int i = 0; i < gp.n; ++i) {
        if (std::fabs(e.values[i]) < 1e-12)
            throw ScenarioError("minkowski_normalizer_at: degenerate metric eigenvalue");
        if (e.values[i] < 0) ++negatives;
    }
    if (negatives != 1)
        throw ScenarioError("minkowski_normalizer_at: metric is not Lorentzian at the point");

    // Ascending order puts the timelike eigenvector first. Fix its time
    // component positive (no time reflection), then pin det Q > 0.
    Mat q = e.vectors;
    if (q.at(0, 0) < 0)
        for (int i = 0; i < q.n; ++i) q.at(i, 0) = -q.at(i, 0);
    if (det(q) < 0)
        for (int i = 0; i < q.n; ++i) q.at(i, q.n - 1) = -q.at(i, q.n - 1);

    // With the pushforward convention g' = (J^-1)^T g J^-1, the chart map
    // needs J = diag(sqrt|lambda_i|) Q^T so that g'(p) = eta exactly.
    Mat scale = Mat::zero(gp.n);
    for (int i = 0; i < gp.n; ++i) scale.at(i, i) = std::sqrt(std::fabs(e.values[i]));
    const Mat l = scale * transpose(q);
    return linear_diffeo(l, p, "minkowski_normalizer");
}

namespace {

// Christoffel symbols at p from central differences of the metric.
// gamma[l][m][n] = Gamma^l_{mn}
std::array<Mat, kMaxDim> christoffel_at(const MetricField& g, const Vec& p, double step) {
    const int dim = g.dim;
    const Mat ginv = inverse(g.eval(p));

    // dg[k] = d g / d x^k
    std::array<Mat, kMaxDim> dg;
    for (int k = 0; k < dim; ++k) {
        Vec pp = p, pm = p;
        pp[k] += step;
        pm[k] -= step;
        dg[k] = (1.0 / (2.0 * step)) * (g.eval(pp) - g.eval(pm));
    }

    std::array<Mat, kMaxDim> gamma;
    for (int l = 0; l < dim; ++l) {
        gamma[l] = Mat::zero(dim);
        for (int m = 0; m < dim; ++m)
            for (int n = 0; n < dim; ++n) {
                double sum = 0;
                for (int s = 0; s < dim; ++s)
                    sum += ginv.at(l, s) *
                           (dg[m].at(s, n) + dg[n].at(s, m) - dg[s].at(m, n));
                gamma[l].at(m, n) = 0.5 * sum;
            }
    }
    return gamma;
}

// Normal-coordinate map to second order: x -> p + L dx + 1/2 L Gamma(dx, dx).
// Makes the pushforward metric equal eta at p with vanishing first derivatives.
Diffeomorphism normal_coordinate_map(const MetricField& g, const Vec& p) {
    const int dim = g.dim;
    const Diffeomorphism lin = minkowski_normalizer_at(g, p);
    const Mat l = lin.jacobian(p);
    const auto gamma = christoffel_at(g, p, 1e-5);

    // quad[a] with quad[a](m,n) = sum_l L^a_l Gamma^l_{mn}
    std::array<Mat, kMaxDim> quad;
    for (int a = 0; a < dim; ++a) {
        quad[a] = Mat::zero(dim);
        for (int lidx = 0; lidx < dim; ++lidx)
            for (int m = 0; m < dim; ++m)
                for (int n = 0; n < dim; ++n)
                    quad[a].at(m, n) += l.at(a, lidx) * gamma[lidx].at(m, n);
    }

    Diffeomorphism out;
    out.dim = dim;
    out.forward_fn = [p, l, quad, dim](const Vec& x) {
        const Vec dx = x - p;
        Vec y = p + l * dx;
        for (int a = 0; a < dim; ++a) y[a] += 0.5 * dot(dx, quad[a] * dx);
        return y;
    };
    out.jacobian_fn = [p, l, quad, dim](const Vec& x) {
        const Vec dx = x - p;
        Mat j = l;
        for (int a = 0; a < dim; ++a) {
            const Vec row = quad[a] * dx; // symmetric contraction
            for (int m = 0; m < dim; ++m) j.at(a, m) += row[m];
        }
        return j;
    };
    out.describe = "normal_coordinates";
    return out;
}

} // namespace

double metric_first_derivative_scale(const MetricField& g, const Vec& p, double step) {
    double worst = 0;
    for (int k = 0; k < g.dim; ++k) {
        Vec pp = p, pm = p;
        pp[k] += step;
        pm[k] -= step;
        worst = std::max(worst, max_abs((1.0 / (2.0 * step)) * (g.eval(pp) - g.eval(pm))));
    }
    return worst;
}

LightconeOutcome make_lightcones_definite(const BranchedScenario& sc,
                                          const LightconeOptions& opt,
                                          const NumericPolicy& policy) {
    const int dim = sc.branch_a.metric.dim;
    const Vec p1 = sc.branch_a.event1.point;
    const Vec p2 = sc.branch_a.event2.point;

    if (norm(p1 - sc.branch_b.event1.point) > 1e-7 ||
        norm(p2 - sc.branch_b.event2.point) > 1e-7)
        throw ScenarioError("make_lightcones_definite: events not aligned across branches; "
                            "apply align_events first");

    const double separation = norm(p1 - p2);
    const double radius = opt.radius > 0 ? opt.radius : 0.25 * separation;
    if (2.0 * radius >= separation)
        throw ConstructionError("make_lightcones_definite: supports around the two events "
                                "would overlap");

    auto branch_map = [&](const MetricField& g) {
        auto normalizer = [&](const Vec& p) {
            const Diffeomorphism core = opt.flatten_first_derivatives
                                            ? normal_coordinate_map(g, p)
                                            : minkowski_normalizer_at(g, p);
            return make_bump_localized(core, p, radius);
        };
        return compose(normalizer(p2), normalizer(p1));
    };

    const Diffeomorphism phi_a = branch_map(sc.branch_a.metric);
    const Diffeomorphism phi_b = branch_map(sc.branch_b.metric);

    LightconeOutcome out;
    out.scenario = apply_quantum_diffeo(sc, phi_a, phi_b, policy);
    if (order_product(out.scenario) != order_product(sc))
        throw ScenarioError("make_lightcones_definite: order product changed (internal error)");

    const Mat eta = minkowski_eta(dim);
    const Vec points[2] = {p1, p2};
    for (int i = 0; i < 2; ++i) {
        LightconeReport rep;
        rep.point = points[i];
        rep.metric_at_point_a = out.scenario.branch_a.metric.eval(points[i]);
        rep.metric_at_point_b = out.scenario.branch_b.metric.eval(points[i]);
        rep.deviation_a = max_abs_diff(rep.metric_at_point_a, eta);
        rep.deviation_b = max_abs_diff(rep.metric_at_point_b, eta);
        rep.lightcone_definite = rep.deviation_a < opt.eps_mink && rep.deviation_b < opt.eps_mink;
        out.reports[i] = rep;
    }
    return out;
}

} // namespace ico
