#include "ico/worldlines.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ico/errors.hpp"
#include "ico/numerics.hpp"

namespace ico {

const char* curve_role_name(CurveRole role) {
    switch (role) {
        case CurveRole::TestParticle: return "gamma0";
        case CurveRole::System1: return "gamma1";
        case CurveRole::System2: return "gamma2";
    }
    return "?";
}

Vec Worldline::position(double lambda) const { return position_fn(lambda); }

Vec Worldline::velocity(double lambda) const {
    if (velocity_fn) return velocity_fn(lambda);
    return central_diff_curve(position_fn, lambda, 1e-6, lambda_min, lambda_max);
}

Worldline static_worldline(int dim, const Vec& spatial, double t0, double t1, CurveRole role) {
    if (spatial.n != dim - 1) throw ConfigError("static_worldline: need dim-1 spatial coords");
    Worldline w;
    w.dim = dim;
    w.lambda_min = t0;
    w.lambda_max = t1;
    w.position_fn = [dim, spatial](double t) {
        Vec p = Vec::zero(dim);
        p[0] = t;
        for (int i = 1; i < dim; ++i) p[i] = spatial[i - 1];
        return p;
    };
    w.velocity_fn = [dim](double) {
        Vec v = Vec::zero(dim);
        v[0] = 1.0;
        return v;
    };
    w.role = role;
    return w;
}

Worldline uniform_worldline(int dim, const Vec& start_spatial, const Vec& velocity_spatial,
                            double t0, double t1, CurveRole role) {
    if (start_spatial.n != dim - 1 || velocity_spatial.n != dim - 1)
        throw ConfigError("uniform_worldline: need dim-1 spatial coords");
    Worldline w;
    w.dim = dim;
    w.lambda_min = t0;
    w.lambda_max = t1;
    w.position_fn = [dim, start_spatial, velocity_spatial, t0](double t) {
        Vec p = Vec::zero(dim);
        p[0] = t;
        for (int i = 1; i < dim; ++i)
            p[i] = start_spatial[i - 1] + velocity_spatial[i - 1] * (t - t0);
        return p;
    };
    w.velocity_fn = [dim, velocity_spatial](double) {
        Vec v = Vec::zero(dim);
        v[0] = 1.0;
        for (int i = 1; i < dim; ++i) v[i] = velocity_spatial[i - 1];
        return v;
    };
    w.role = role;
    return w;
}

Worldline piecewise_linear_worldline(const std::vector<Vec>& waypoints, CurveRole role) {
    if (waypoints.size() < 2)
        throw ConfigError("piecewise_linear_worldline: need at least two waypoints");
    const int dim = waypoints.front().n;
    for (size_t i = 0; i + 1 < waypoints.size(); ++i) {
        if (waypoints[i].n != dim) throw ConfigError("piecewise_linear_worldline: mixed dims");
        if (!(waypoints[i + 1][0] > waypoints[i][0]))
            throw ConfigError("piecewise_linear_worldline: waypoint times must increase");
    }

    // segment index for a given time; kink parameters map to the right segment
    auto segment_of = [waypoints](double t) {
        size_t lo = 0, hi = waypoints.size() - 1;
        while (hi - lo > 1) {
            const size_t mid = (lo + hi) / 2;
            if (waypoints[mid][0] <= t)
                lo = mid;
            else
                hi = mid;
        }
        return lo;
    };

    Worldline w;
    w.dim = dim;
    w.lambda_min = waypoints.front()[0];
    w.lambda_max = waypoints.back()[0];
    w.position_fn = [waypoints, segment_of](double t) {
        const size_t s = segment_of(t);
        const Vec& a = waypoints[s];
        const Vec& b = waypoints[s + 1];
        const double f = (t - a[0]) / (b[0] - a[0]);
        return a + f * (b - a);
    };
    w.velocity_fn = [waypoints, segment_of](double t) {
        const size_t s = segment_of(t);
        const Vec& a = waypoints[s];
        const Vec& b = waypoints[s + 1];
        return (1.0 / (b[0] - a[0])) * (b - a);
    };
    for (size_t i = 1; i + 1 < waypoints.size(); ++i) w.kinks.push_back(waypoints[i][0]);
    w.role = role;
    return w;
}

Worldline sinusoidal_worldline(double x0, double amp, double freq, double phase, double t0,
                               double t1, CurveRole role) {
    Worldline w;
    w.dim = 2;
    w.lambda_min = t0;
    w.lambda_max = t1;
    w.position_fn = [=](double t) { return Vec{t, x0 + amp * std::sin(freq * t + phase)}; };
    w.velocity_fn = [=](double t) { return Vec{1.0, amp * freq * std::cos(freq * t + phase)}; };
    w.role = role;
    return w;
}

Worldline pushforward_curve(const Diffeomorphism& phi, const Worldline& gamma) {
    if (phi.dim != gamma.dim) throw ConfigError("pushforward_curve: dimension mismatch");
    Worldline w = gamma;
    w.position_fn = [phi, base = gamma.position_fn](double lambda) {
        return phi.forward(base(lambda));
    };
    if (gamma.velocity_fn) {
        w.velocity_fn = [phi, pos = gamma.position_fn, vel = gamma.velocity_fn](double lambda) {
            return phi.jacobian(pos(lambda)) * vel(lambda);
        };
    } else {
        w.velocity_fn = nullptr;
    }
    return w;
}

Worldline reparametrize(const Worldline& gamma, double delta) {
    Worldline w = gamma;
    w.lambda_min = gamma.lambda_min + delta;
    w.lambda_max = gamma.lambda_max + delta;
    w.position_fn = [base = gamma.position_fn, delta](double lambda) {
        return base(lambda - delta);
    };
    if (gamma.velocity_fn)
        w.velocity_fn = [base = gamma.velocity_fn, delta](double lambda) {
            return base(lambda - delta);
        };
    w.kinks.clear();
    for (double k : gamma.kinks) w.kinks.push_back(k + delta);
    return w;
}

double proper_time(const Worldline& gamma, const MetricField& g, double lambda_a,
                   double lambda_b, double rel_tol) {
    if (gamma.dim != g.dim) throw ConfigError("proper_time: dimension mismatch");
    if (!(gamma.lambda_min - 1e-12 <= lambda_a && lambda_a <= lambda_b &&
          lambda_b <= gamma.lambda_max + 1e-12))
        throw ConfigError("proper_time: interval outside the curve's parameter range");
    if (lambda_a == lambda_b) return 0.0;

    auto integrand = [&](double lambda) {
        const Vec v = gamma.velocity(lambda);
        const Mat gv = g.eval(gamma.position(lambda));
        const double q = dot(v, gv * v);
        if (q >= 0) {
            std::ostringstream os;
            os << "proper_time: curve not timelike at lambda = " << lambda
               << " (g(v,v) = " << q << ")";
            throw ScenarioError(os.str());
        }
        return std::sqrt(-q);
    };

    QuadOptions opt;
    opt.rel_tol = rel_tol;
    return adaptive_quad_segmented(integrand, lambda_a, lambda_b, gamma.kinks, opt);
}

namespace {

struct GnOutcome {
    bool converged = false;
    double lambda0 = 0, sigma = 0, residual = 0;
};

GnOutcome gauss_newton_refine(const Worldline& g0, const Worldline& gi, double lambda0,
                              double sigma) {
    auto clamp = [](double v, double lo, double hi) { return std::min(std::max(v, lo), hi); };

    Vec f = g0.position(lambda0) - gi.position(sigma);
    double fn = norm(f);
    for (int it = 0; it < 60; ++it) {
        if (fn < 1e-13) break;
        const Vec d0 = g0.velocity(lambda0);
        const Vec di = gi.velocity(sigma);
        // normal equations of the D x 2 least-squares system
        const double a00 = dot(d0, d0);
        const double a01 = -dot(d0, di);
        const double a11 = dot(di, di);
        const double b0 = -dot(d0, f);
        const double b1 = dot(di, f);
        const double detn = a00 * a11 - a01 * a01;
        if (std::fabs(detn) < 1e-14 * std::max(1.0, a00 * a11)) break;
        const double step_l = (b0 * a11 - a01 * b1) / detn;
        const double step_s = (a00 * b1 - b0 * a01) / detn;

        double damp = 1.0;
        bool improved = false;
        for (int h = 0; h < 25; ++h) {
            const double nl = clamp(lambda0 + damp * step_l, g0.lambda_min, g0.lambda_max);
            const double ns = clamp(sigma + damp * step_s, gi.lambda_min, gi.lambda_max);
            const Vec f2 = g0.position(nl) - gi.position(ns);
            const double f2n = norm(f2);
            if (f2n < fn) {
                lambda0 = nl;
                sigma = ns;
                f = f2;
                fn = f2n;
                improved = true;
                break;
            }
            damp *= 0.5;
        }
        if (!improved) break;
    }
    return {true, lambda0, sigma, fn};
}

} // namespace

std::vector<Coincidence> detect_coincidences(const Worldline& gamma0, const Worldline& gamma_i,
                                             double tol, int grid) {
    if (gamma0.dim != gamma_i.dim) throw ConfigError("detect_coincidences: dimension mismatch");
    if (tol <= 0) throw ConfigError("detect_coincidences: tolerance must be positive");
    grid = std::max(grid, 128);

    const double h0 = (gamma0.lambda_max - gamma0.lambda_min) / grid;
    const double hi = (gamma_i.lambda_max - gamma_i.lambda_min) / grid;

    std::vector<Vec> p0(grid + 1), pi(grid + 1);
    for (int k = 0; k <= grid; ++k) {
        p0[k] = gamma0.position(gamma0.lambda_min + k * h0);
        pi[k] = gamma_i.position(gamma_i.lambda_min + k * hi);
    }

    double v0max = 0, vimax = 0;
    for (int k = 0; k < grid; ++k) {
        v0max = std::max(v0max, norm(p0[k + 1] - p0[k]) / h0);
        vimax = std::max(vimax, norm(pi[k + 1] - pi[k]) / hi);
    }
    const double gate = 3.0 * (v0max * h0 + vimax * hi) + 10.0 * tol;
    const double gate2 = gate * gate;

    std::vector<double> d2(static_cast<size_t>(grid + 1) * (grid + 1));
    auto idx = [grid](int k, int m) { return static_cast<size_t>(k) * (grid + 1) + m; };
    for (int k = 0; k <= grid; ++k)
        for (int m = 0; m <= grid; ++m) {
            const Vec d = p0[k] - pi[m];
            d2[idx(k, m)] = dot(d, d);
        }

    std::vector<Coincidence> found;
    for (int k = 0; k <= grid; ++k)
        for (int m = 0; m <= grid; ++m) {
            const double v = d2[idx(k, m)];
            if (v > gate2) continue;
            bool is_min = true;
            for (int dk = -1; dk <= 1 && is_min; ++dk)
                for (int dm = -1; dm <= 1; ++dm) {
                    if (dk == 0 && dm == 0) continue;
                    const int kk = k + dk, mm = m + dm;
                    if (kk < 0 || mm < 0 || kk > grid || mm > grid) continue;
                    if (d2[idx(kk, mm)] < v) {
                        is_min = false;
                        break;
                    }
                }
            if (!is_min) continue;

            const GnOutcome gn = gauss_newton_refine(gamma0, gamma_i, gamma0.lambda_min + k * h0,
                                                     gamma_i.lambda_min + m * hi);
            if (!gn.converged || gn.residual > tol) continue;
            Coincidence c;
            c.lambda0 = gn.lambda0;
            c.lambda_other = gn.sigma;
            c.point = gamma0.position(gn.lambda0);
            c.residual = gn.residual;
            c.which_system = (gamma_i.role == CurveRole::System2) ? 2 : 1;
            found.push_back(c);
        }

    std::sort(found.begin(), found.end(),
              [](const Coincidence& a, const Coincidence& b) { return a.lambda0 < b.lambda0; });
    std::vector<Coincidence> merged;
    for (const Coincidence& c : found) {
        if (!merged.empty() && std::fabs(c.lambda0 - merged.back().lambda0) <= 1e-6 &&
            std::fabs(c.lambda_other - merged.back().lambda_other) <= 1e-6) {
            if (c.residual < merged.back().residual) merged.back() = c;
            continue;
        }
        merged.push_back(c);
    }
    return merged;
}

bool orientation_sign(const MetricField& g, const Vec& p, const Vec& v0, const Vec& vi) {
    const Mat gp = g.eval(p);
    const double q0 = dot(v0, gp * v0);
    const double qi = dot(vi, gp * vi);
    if (!(q0 < 0) || !(qi < 0))
        throw ScenarioError("orientation_sign: tangent vector is null, spacelike or zero");
    return dot(v0, gp * vi) < 0;
}

void check_timelike(const Worldline& gamma, const MetricField& g, int samples) {
    samples = std::max(samples, 257);
    const double span = gamma.lambda_max - gamma.lambda_min;
    for (int k = 0; k <= samples; ++k) {
        const double lambda = gamma.lambda_min + span * k / samples;
        const Vec v = gamma.velocity(lambda);
        const Vec p = gamma.position(lambda);
        if (!all_finite(p) || !all_finite(v))
            throw ScenarioError("check_timelike: curve evaluates to a non-finite point");
        const double q = dot(v, g.eval(p) * v);
        if (!(q < 0)) {
            std::ostringstream os;
            os << "check_timelike: " << curve_role_name(gamma.role)
               << " not timelike at lambda = " << lambda;
            throw ScenarioError(os.str());
        }
    }
}

} // namespace ico
