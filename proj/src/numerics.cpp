#include "ico/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "ico/errors.hpp"

namespace ico {

namespace {

// G7,K15 nodes on [0,1] with Gauss and Kronrod weights.
constexpr double kGK[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

struct PanelResult {
    double k15;
    double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b);
    const double h = 0.5 * (b - a);

    const double y0 = f(mid);
    double g7 = kGK[0][1] * y0;
    double k15 = kGK[0][2] * y0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * kGK[i][0];
        const double yi = f(mid + dx) + f(mid - dx);
        g7 += kGK[i][1] * yi;
        k15 += kGK[i][2] * yi;
    }
    g7 *= h;
    k15 *= h;

    const double diff = std::fabs(k15 - g7);
    // QUADPACK-style sharpened estimate, never above the raw difference.
    double err = diff;
    if (diff > 0) err = std::min(diff, std::pow(200.0 * diff, 1.5));
    return {k15, err};
}

} // namespace

double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt) {
    if (a == b) return 0.0;

    struct Interval {
        double a, b, value, err;
    };

    const PanelResult whole = gk15(f, a, b);
    double target = opt.abs_tol;
    if (target <= 0.0) target = opt.rel_tol * std::max(std::fabs(whole.k15), 1e-30);

    std::vector<Interval> stack;
    stack.push_back({a, b, whole.k15, whole.err});

    double sum = 0.0;
    double comp = 0.0; // Kahan compensation
    const double width_total = std::fabs(b - a);
    int panels = 1;

    while (!stack.empty()) {
        const Interval iv = stack.back();
        stack.pop_back();
        const double local_budget = target * (std::fabs(iv.b - iv.a) / width_total);
        if (iv.err <= std::max(local_budget, 1e-305)) {
            const double y = iv.value - comp;
            const double t = sum + y;
            comp = (t - sum) - y;
            sum = t;
            continue;
        }
        if (panels + 2 > opt.max_intervals)
            throw NumericError("adaptive_quad: interval budget exhausted");
        const double mid = 0.5 * (iv.a + iv.b);
        const PanelResult left = gk15(f, iv.a, mid);
        const PanelResult right = gk15(f, mid, iv.b);
        stack.push_back({iv.a, mid, left.k15, left.err});
        stack.push_back({mid, iv.b, right.k15, right.err});
        panels += 2;
    }
    return sum;
}

double adaptive_quad_segmented(const std::function<double(double)>& f, double a, double b,
                               const std::vector<double>& breakpoints, const QuadOptions& opt) {
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double c : breakpoints)
        if (c > a + 1e-14 && c < b - 1e-14) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());

    double total = 0.0;
    for (size_t i = 0; i + 1 < cuts.size(); ++i)
        total += adaptive_quad(f, cuts[i], cuts[i + 1], opt);
    return total;
}

Vec central_diff_curve(const std::function<Vec(double)>& f, double lambda, double step,
                       double lo, double hi) {
    if (lambda - step >= lo && lambda + step <= hi) {
        Vec v = f(lambda + step) - f(lambda - step);
        return (1.0 / (2.0 * step)) * v;
    }
    // one-sided second order at the ends
    if (lambda + 2 * step <= hi) {
        Vec v = -3.0 * f(lambda) + 4.0 * f(lambda + step) - 1.0 * f(lambda + 2 * step);
        return (1.0 / (2.0 * step)) * v;
    }
    Vec v = 3.0 * f(lambda) - 4.0 * f(lambda - step) + 1.0 * f(lambda - 2 * step);
    return (1.0 / (2.0 * step)) * v;
}

Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double step) {
    Mat j = Mat::zero(x.n);
    for (int col = 0; col < x.n; ++col) {
        Vec xp = x, xm = x;
        xp[col] += step;
        xm[col] -= step;
        const Vec d = f(xp) - f(xm);
        for (int row = 0; row < x.n; ++row) j.at(row, col) = d[row] / (2.0 * step);
    }
    return j;
}

Vec newton_inverse(const std::function<Vec(const Vec&)>& forward,
                   const std::function<Mat(const Vec&)>& jac, const Vec& target, Vec guess,
                   double tol, int max_iter) {
    auto jacobian_at = [&](const Vec& x) {
        return jac ? jac(x) : fd_jacobian(forward, x, 1e-6);
    };

    Vec x = guess;
    Vec residual = forward(x) - target;
    double rnorm = norm(residual);
    for (int it = 0; it < max_iter; ++it) {
        if (rnorm <= tol) return x;
        const Mat j = jacobian_at(x);
        Vec step;
        try {
            step = solve(j, residual);
        } catch (const NumericError&) {
            throw NumericError("newton_inverse: singular Jacobian");
        }
        double damp = 1.0;
        for (int h = 0; h < 30; ++h) {
            Vec cand = x - damp * step;
            Vec r2 = forward(cand) - target;
            const double r2n = norm(r2);
            if (r2n < rnorm) {
                x = cand;
                residual = r2;
                rnorm = r2n;
                break;
            }
            damp *= 0.5;
            if (h == 29) throw NumericError("newton_inverse: line search stalled");
        }
    }
    if (rnorm <= tol) return x;
    throw NumericError("newton_inverse: no convergence after iteration cap");
}

double newton_scalar(const std::function<double(double)>& f, double x0, double tol,
                     int max_iter, double fd_step) {
    double x = x0;
    for (int it = 0; it < max_iter; ++it) {
        const double fx = f(x);
        if (std::fabs(fx) <= tol) return x;
        const double h = fd_step * std::max(1.0, std::fabs(x));
        const double d = (f(x + h) - f(x - h)) / (2.0 * h);
        if (std::fabs(d) < 1e-300) throw NumericError("newton_scalar: flat derivative");
        double step = fx / d;
        double damp = 1.0;
        while (std::fabs(f(x - damp * step)) >= std::fabs(fx) && damp > 1e-6) damp *= 0.5;
        x -= damp * step;
    }
    if (std::fabs(f(x)) <= tol * 10) return x;
    throw NumericError("newton_scalar: no convergence");
}

} // namespace ico
