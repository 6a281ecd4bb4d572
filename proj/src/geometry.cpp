#include "ico/geometry.hpp"

#include <cmath>
#include <memory>

#include "ico/errors.hpp"
#include "ico/numerics.hpp"

namespace ico {

Vec Diffeomorphism::forward(const Vec& p) const {
    assert(p.n == dim);
    return forward_fn(p);
}

Vec Diffeomorphism::inverse(const Vec& p) const {
    assert(p.n == dim);
    if (inverse_fn) return inverse_fn(p);
    return newton_inverse(forward_fn, jacobian_fn, p, p, 1e-10, 100);
}

Mat Diffeomorphism::jacobian(const Vec& p) const {
    assert(p.n == dim);
    if (jacobian_fn) return jacobian_fn(p);
    return fd_jacobian(forward_fn, p, 1e-6);
}

MetricField minkowski_metric(int dim) {
    const Mat eta = minkowski_eta(dim);
    return {dim, [eta](const Vec&) { return eta; }};
}

MetricField weak_field_metric(int dim, double mass, double soft, const Vec& center_spatial) {
    if (center_spatial.n != dim - 1)
        throw ConfigError("weak_field_metric: center must have dim-1 spatial coordinates");
    if (soft <= 0) throw ConfigError("weak_field_metric: softening length must be positive");
    if (mass / soft >= 0.1)
        throw ConfigError("weak_field_metric: |phi| reaches " + std::to_string(mass / soft) +
                          ", outside weak-field validity (< 0.1)");
    return {dim, [dim, mass, soft, center_spatial](const Vec& p) {
                double r2 = 0;
                for (int i = 1; i < dim; ++i) {
                    const double d = p[i] - center_spatial[i - 1];
                    r2 += d * d;
                }
                const double phi = -mass / (std::sqrt(r2) + soft);
                Mat g = Mat::identity(dim);
                g.at(0, 0) = -(1.0 + 2.0 * phi);
                return g;
            }};
}

Diffeomorphism identity_diffeo(int dim) {
    return {dim, [](const Vec& p) { return p; }, [](const Vec& p) { return p; },
            [dim](const Vec&) { return Mat::identity(dim); }, "identity"};
}

Diffeomorphism translation_diffeo(const Vec& offset) {
    const int dim = offset.n;
    return {dim, [offset](const Vec& p) { return p + offset; },
            [offset](const Vec& p) { return p - offset; },
            [dim](const Vec&) { return Mat::identity(dim); }, "translation"};
}

Diffeomorphism linear_diffeo(const Mat& m, const Vec& anchor, const std::string& name) {
    const Mat minv = inverse(m); // throws if singular
    return {m.n,
            [m, anchor](const Vec& p) { return m * (p - anchor) + anchor; },
            [minv, anchor](const Vec& p) { return minv * (p - anchor) + anchor; },
            [m](const Vec&) { return m; }, name};
}

Diffeomorphism boost_diffeo(int dim, double v, int axis) {
    if (axis < 1 || axis >= dim) throw ConfigError("boost_diffeo: bad spatial axis");
    if (std::fabs(v) >= 1.0) throw ConfigError("boost_diffeo: |v| must be < 1");
    const double gamma = 1.0 / std::sqrt(1.0 - v * v);
    Mat m = Mat::identity(dim);
    m.at(0, 0) = gamma;
    m.at(0, axis) = gamma * v;
    m.at(axis, 0) = gamma * v;
    m.at(axis, axis) = gamma;
    return linear_diffeo(m, Vec::zero(dim), "boost");
}

Diffeomorphism sin_shear_diffeo(int dim, int target_axis, int source_axis, double amp,
                                double freq, double phase) {
    if (target_axis == source_axis || target_axis < 0 || source_axis < 0 ||
        target_axis >= dim || source_axis >= dim)
        throw ConfigError("sin_shear_diffeo: bad axis pair");
    auto fwd = [=](const Vec& p) {
        Vec q = p;
        q[target_axis] += amp * std::sin(freq * p[source_axis] + phase);
        return q;
    };
    auto inv = [=](const Vec& p) {
        Vec q = p;
        q[target_axis] -= amp * std::sin(freq * p[source_axis] + phase);
        return q;
    };
    auto jac = [=](const Vec& p) {
        Mat j = Mat::identity(dim);
        j.at(target_axis, source_axis) = amp * freq * std::cos(freq * p[source_axis] + phase);
        return j;
    };
    return {dim, fwd, inv, jac, "sin_shear"};
}

Diffeomorphism compose(const Diffeomorphism& outer, const Diffeomorphism& inner) {
    if (outer.dim != inner.dim) throw ConfigError("compose: dimension mismatch");
    // One shared copy of the components: capturing them by value in each of
    // the three closures would duplicate deep chains exponentially.
    auto parts = std::make_shared<const std::pair<Diffeomorphism, Diffeomorphism>>(outer, inner);
    Diffeomorphism out;
    out.dim = outer.dim;
    out.forward_fn = [parts](const Vec& p) {
        return parts->first.forward(parts->second.forward(p));
    };
    out.inverse_fn = [parts](const Vec& p) {
        return parts->second.inverse(parts->first.inverse(p));
    };
    out.jacobian_fn = [parts](const Vec& p) {
        const Vec mid = parts->second.forward(p);
        return parts->first.jacobian(mid) * parts->second.jacobian(p);
    };
    out.describe = outer.describe + " o " + inner.describe;
    return out;
}

double bump_weight(double u) {
    if (u >= 1.0) return 0.0;
    const double s = 1.0 - u * u;
    return s * s;
}

double bump_weight_deriv(double u) {
    if (u >= 1.0) return 0.0;
    return -4.0 * u * (1.0 - u * u);
}

namespace {

// Sample points for certifying a bump map: center, interior shells, boundary.
std::vector<Vec> bump_probe_points(const Vec& center, double radius) {
    std::vector<Vec> pts;
    pts.push_back(center);
    const int dim = center.n;
    const int directions = (dim == 2) ? 12 : 26;
    for (double frac : {0.25, 0.5, 0.75, 0.95, 1.1}) {
        for (int d = 0; d < directions; ++d) {
            Vec u = Vec::zero(dim);
            if (dim == 2) {
                const double ang = 2.0 * M_PI * d / directions;
                u[0] = std::cos(ang);
                u[1] = std::sin(ang);
            } else {
                // lattice directions on the unit sphere
                int code = d + 1;
                double len2 = 0;
                for (int i = 0; i < dim; ++i) {
                    u[i] = static_cast<double>((code % 3) - 1);
                    code /= 3;
                    len2 += u[i] * u[i];
                }
                if (len2 < 0.5) continue;
                u *= 1.0 / std::sqrt(len2);
            }
            pts.push_back(center + (frac * radius) * u);
        }
    }
    return pts;
}

Diffeomorphism make_bump_map(const Vec& center, double radius,
                             std::function<Vec(const Vec&)> displacement,
                             std::function<Mat(const Vec&)> displacement_jac,
                             const std::string& name) {
    struct Kernel {
        Vec center;
        double radius;
        int dim;
        std::function<Vec(const Vec&)> displacement;
        std::function<Mat(const Vec&)> displacement_jac;
    };
    auto k = std::make_shared<const Kernel>(Kernel{center, radius, center.n,
                                                   std::move(displacement),
                                                   std::move(displacement_jac)});
    auto fwd = [k](const Vec& p) {
        const double u = norm(p - k->center) / k->radius;
        if (u >= 1.0) return p;
        return p + bump_weight(u) * k->displacement(p);
    };
    auto jac = [k](const Vec& p) {
        const Vec rel = p - k->center;
        const double r = norm(rel);
        const double u = r / k->radius;
        if (u >= 1.0) return Mat::identity(k->dim);
        const double w = bump_weight(u);
        Mat j = Mat::identity(k->dim) + w * k->displacement_jac(p);
        if (r > 1e-14) {
            const Vec grad_u = (1.0 / (k->radius * r)) * rel;
            j = j + bump_weight_deriv(u) * outer(k->displacement(p), grad_u);
        }
        return j;
    };
    Diffeomorphism out;
    out.dim = center.n;
    out.forward_fn = fwd;
    out.jacobian_fn = jac;
    // identity outside the open ball, so exterior points invert exactly
    out.inverse_fn = [k, fwd, jac](const Vec& y) {
        if (norm(y - k->center) >= k->radius) return y;
        return newton_inverse(fwd, jac, y, y, 1e-12, 100);
    };
    out.describe = name;
    return out;
}

} // namespace

Diffeomorphism make_bump_localized(const Diffeomorphism& phi_core, const Vec& center,
                                   double radius) {
    if (phi_core.dim != center.n) throw ConfigError("make_bump_localized: dimension mismatch");
    if (radius <= 0) throw ConfigError("make_bump_localized: radius must be positive");
    if (norm(phi_core.forward(center) - center) > 1e-9)
        throw ConstructionError("make_bump_localized: core map must fix the center");

    auto displacement = [phi_core](const Vec& p) { return phi_core.forward(p) - p; };
    auto displacement_jac = [phi_core, dim = phi_core.dim](const Vec& p) {
        return phi_core.jacobian(p) - Mat::identity(dim);
    };
    Diffeomorphism out = make_bump_map(center, radius, displacement, displacement_jac,
                                       "bump(" + phi_core.describe + ")");
    check_diffeo_on_samples(out, bump_probe_points(center, radius));
    return out;
}

Diffeomorphism bump_translation(const Vec& center, const Vec& offset, double radius) {
    if (center.n != offset.n) throw ConfigError("bump_translation: dimension mismatch");
    if (radius <= 0) throw ConfigError("bump_translation: radius must be positive");
    if (norm(offset) * kBumpMaxSlope / radius > 0.8)
        throw ConstructionError("bump_translation: offset too large for certifiable invertibility");

    const int dim = center.n;
    auto displacement = [offset](const Vec&) { return offset; };
    auto displacement_jac = [dim](const Vec&) { return Mat::zero(dim); };
    Diffeomorphism out =
        make_bump_map(center, radius, displacement, displacement_jac, "bump_translation");
    check_diffeo_on_samples(out, bump_probe_points(center, radius));
    return out;
}

MetricField pushforward_metric(const Diffeomorphism& phi, const MetricField& g) {
    if (phi.dim != g.dim) throw ConfigError("pushforward_metric: dimension mismatch");
    return {g.dim, [phi, g](const Vec& y) {
                const Vec x = phi.inverse(y);
                const Mat k = inverse(phi.jacobian(x));
                return congruence(k, g.eval(x));
            }};
}

void check_diffeo_on_samples(const Diffeomorphism& phi, const std::vector<Vec>& points,
                             double roundtrip_tol, double det_floor) {
    for (const Vec& p : points) {
        Vec back;
        try {
            back = phi.inverse(phi.forward(p));
        } catch (const NumericError&) {
            throw ConstructionError("diffeomorphism check: inverse failed to converge");
        }
        double worst = 0;
        for (int i = 0; i < p.n; ++i) worst = std::max(worst, std::fabs(back[i] - p[i]));
        if (worst > roundtrip_tol)
            throw ConstructionError("diffeomorphism check: round-trip error " +
                                    std::to_string(worst));
        if (std::fabs(det(phi.jacobian(p))) <= det_floor)
            throw ConstructionError("diffeomorphism check: Jacobian close to singular");
    }
}

void ChartBox::expand(const Vec& p) {
    if (lo.n == 0) {
        lo = p;
        hi = p;
        return;
    }
    for (int i = 0; i < p.n; ++i) {
        lo[i] = std::min(lo[i], p[i]);
        hi[i] = std::max(hi[i], p[i]);
    }
}

void ChartBox::inflate(double margin) {
    for (int i = 0; i < lo.n; ++i) {
        lo[i] -= margin;
        hi[i] += margin;
    }
}

double ChartBox::scale() const {
    double s = 0;
    for (int i = 0; i < lo.n; ++i) s = std::max(s, hi[i] - lo[i]);
    return s;
}

Vec ChartBox::sample(std::mt19937_64& rng) const {
    Vec p = Vec::zero(lo.n);
    for (int i = 0; i < lo.n; ++i) {
        std::uniform_real_distribution<double> dist(lo[i], hi[i]);
        p[i] = dist(rng);
    }
    return p;
}

} // namespace ico
