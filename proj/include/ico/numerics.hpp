#pragma once

#include <functional>
#include <vector>

#include "ico/linalg.hpp"

namespace ico {

struct QuadOptions {
    double rel_tol = 1e-9;
    double abs_tol = 0.0; // 0 = derive from the first whole-interval estimate
    int max_intervals = 20000;
};

// Adaptive Gauss-Kronrod (G7,K15) quadrature on [a,b].
double adaptive_quad(const std::function<double(double)>& f, double a, double b,
                     const QuadOptions& opt = {});

// Same, but splits at interior breakpoints first (integrand kinks).
double adaptive_quad_segmented(const std::function<double(double)>& f, double a, double b,
                               const std::vector<double>& breakpoints,
                               const QuadOptions& opt = {});

// Central difference of a curve, one-sided (second order) at domain ends.
Vec central_diff_curve(const std::function<Vec(double)>& f, double lambda, double step,
                       double lo, double hi);

// Central-difference Jacobian of a map R^n -> R^n, column j = df/dx_j.
Mat fd_jacobian(const std::function<Vec(const Vec&)>& f, const Vec& x, double step);

// Damped Newton solve of forward(x) = target. `jac` may be empty, in which
// case the Jacobian falls back to central differences on `forward`.
Vec newton_inverse(const std::function<Vec(const Vec&)>& forward,
                   const std::function<Mat(const Vec&)>& jac, const Vec& target, Vec guess,
                   double tol = 1e-10, int max_iter = 100);

// Scalar Newton with finite-difference derivative, bisection-free.
double newton_scalar(const std::function<double(double)>& f, double x0, double tol = 1e-10,
                     int max_iter = 60, double fd_step = 1e-5);

} // namespace ico
