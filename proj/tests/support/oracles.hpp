// Independent reference computations used by the tests. Everything here is
// deliberately implemented with different methods than the library under
// test: composite Simpson instead of adaptive Gauss-Kronrod, Richardson
// finite differences instead of closed-form Jacobians, direct 2x2 algebra
// instead of register machinery.
#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "ico/geometry.hpp"
#include "ico/worldlines.hpp"

namespace oracle {

inline double composite_simpson(const std::function<double(double)>& f, double a, double b,
                                int n = 4096) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double sum = f(a) + f(b);
    for (int k = 1; k < n; ++k) sum += f(a + k * h) * ((k % 2) ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// Proper time of a curve against a metric, splitting at kinks, Simpson panels.
inline double proper_time_simpson(const ico::Worldline& w, const ico::MetricField& g, double a,
                                  double b, int n_per_segment = 4096) {
    std::vector<double> cuts{a};
    for (double k : w.kinks)
        if (k > a + 1e-12 && k < b - 1e-12) cuts.push_back(k);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i) {
        auto f = [&](double lam) {
            const ico::Vec v = w.velocity(lam);
            const double q = dot(v, g.eval(w.position(lam)) * v);
            return std::sqrt(-q);
        };
        // nudge panel ends off the kinks so one-sided velocities are used
        const double lo = cuts[i] + 1e-12;
        const double hi = cuts[i + 1] - 1e-12;
        total += composite_simpson(f, lo, hi, n_per_segment);
    }
    return total;
}

// Richardson-extrapolated central-difference Jacobian (independent of the
// library's fixed-step fallback).
inline ico::Mat richardson_jacobian(const std::function<ico::Vec(const ico::Vec&)>& f,
                                    const ico::Vec& x, double h = 1e-4) {
    auto central = [&](double step) {
        ico::Mat j = ico::Mat::zero(x.n);
        for (int c = 0; c < x.n; ++c) {
            ico::Vec xp = x, xm = x;
            xp[c] += step;
            xm[c] -= step;
            const ico::Vec d = f(xp) - f(xm);
            for (int r = 0; r < x.n; ++r) j.at(r, c) = d[r] / (2.0 * step);
        }
        return j;
    };
    const ico::Mat j1 = central(h);
    const ico::Mat j2 = central(h / 2.0);
    ico::Mat out = ico::Mat::zero(x.n);
    for (int i = 0; i < x.n * x.n; ++i) out.a[i] = (4.0 * j2.a[i] - j1.a[i]) / 3.0;
    return out;
}

// exp(-i theta sigma_z / 2) applied to a 2-spinor, written out directly.
inline std::array<std::complex<double>, 2> spin_rotation_z(
    const std::array<std::complex<double>, 2>& v, double theta) {
    const std::complex<double> e0 = std::exp(std::complex<double>(0, -0.5 * theta));
    const std::complex<double> e1 = std::exp(std::complex<double>(0, +0.5 * theta));
    return {e0 * v[0], e1 * v[1]};
}

// Intersection parameters of two straight chart lines p(t) = p0 + t d0,
// q(s) = q0 + s d1 in two dimensions.
struct LineCrossing {
    bool exists = false;
    double t = 0, s = 0;
};

inline LineCrossing intersect_lines_2d(const ico::Vec& p0, const ico::Vec& d0,
                                       const ico::Vec& q0, const ico::Vec& d1) {
    const double det = d0[0] * (-d1[1]) - (-d1[0]) * d0[1];
    if (std::fabs(det) < 1e-14) return {};
    const double rx = q0[0] - p0[0];
    const double ry = q0[1] - p0[1];
    LineCrossing c;
    c.exists = true;
    c.t = (rx * (-d1[1]) - (-d1[0]) * ry) / det;
    c.s = (d0[0] * ry - rx * d0[1]) / det;
    return c;
}

} // namespace oracle
