#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <initializer_list>

#include "ico/errors.hpp"

namespace ico {

// Small dense vectors/matrices with runtime dimension <= 4. Charts in this
// library are 1+1 by default and 3+1 at most, so fixed capacity avoids any
// heap traffic in the integration and root-finding hot paths.
inline constexpr int kMaxDim = 4;

struct Vec {
    int n = 0;
    std::array<double, kMaxDim> a{};

    Vec() = default;
    Vec(std::initializer_list<double> xs) {
        assert(static_cast<int>(xs.size()) <= kMaxDim);
        n = static_cast<int>(xs.size());
        int i = 0;
        for (double x : xs) a[i++] = x;
    }
    static Vec zero(int dim) {
        Vec v;
        v.n = dim;
        return v;
    }

    double& operator[](int i) { return a[static_cast<size_t>(i)]; }
    double operator[](int i) const { return a[static_cast<size_t>(i)]; }

    Vec& operator+=(const Vec& o) {
        assert(n == o.n);
        for (int i = 0; i < n; ++i) a[i] += o.a[i];
        return *this;
    }
    Vec& operator-=(const Vec& o) {
        assert(n == o.n);
        for (int i = 0; i < n; ++i) a[i] -= o.a[i];
        return *this;
    }
    Vec& operator*=(double s) {
        for (int i = 0; i < n; ++i) a[i] *= s;
        return *this;
    }
};

inline Vec operator+(Vec x, const Vec& y) { return x += y; }
inline Vec operator-(Vec x, const Vec& y) { return x -= y; }
inline Vec operator*(double s, Vec x) { return x *= s; }
inline Vec operator-(Vec x) { return x *= -1.0; }

inline double dot(const Vec& x, const Vec& y) {
    assert(x.n == y.n);
    double s = 0;
    for (int i = 0; i < x.n; ++i) s += x.a[i] * y.a[i];
    return s;
}
inline double norm(const Vec& x) { return std::sqrt(dot(x, x)); }

inline bool all_finite(const Vec& x) {
    for (int i = 0; i < x.n; ++i)
        if (!std::isfinite(x.a[i])) return false;
    return true;
}

struct Mat {
    int n = 0;
    std::array<double, kMaxDim * kMaxDim> a{}; // row major

    static Mat zero(int dim) {
        Mat m;
        m.n = dim;
        return m;
    }
    static Mat identity(int dim) {
        Mat m = zero(dim);
        for (int i = 0; i < dim; ++i) m.at(i, i) = 1.0;
        return m;
    }

    double& at(int i, int j) { return a[static_cast<size_t>(i * n + j)]; }
    double at(int i, int j) const { return a[static_cast<size_t>(i * n + j)]; }
};

Mat operator*(const Mat& x, const Mat& y);
Vec operator*(const Mat& m, const Vec& v);
Mat operator+(const Mat& x, const Mat& y);
Mat operator-(const Mat& x, const Mat& y);
Mat operator*(double s, Mat m);
Mat transpose(const Mat& m);

double det(const Mat& m);
// Throws NumericError when |det| is below 1e-300 scale.
Mat inverse(const Mat& m);
// Solves A x = b by Gaussian elimination with partial pivoting.
Vec solve(const Mat& A, const Vec& b);

// a^T g a
Mat congruence(const Mat& a, const Mat& g);

double max_abs_diff(const Mat& x, const Mat& y);
double max_abs(const Mat& x);

// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
// Eigenvalues come back ascending, vectors(:,k) is the k-th eigenvector.
struct EigenSym {
    Vec values;
    Mat vectors;
};
EigenSym eigen_sym(const Mat& m);

// diag(-1, +1, ..., +1)
Mat minkowski_eta(int dim);

// Lorentzian = symmetric with exactly one negative eigenvalue.
bool is_lorentzian(const Mat& g, double sym_tol = 1e-12);

// Rank-1 update u v^T.
Mat outer(const Vec& u, const Vec& v);

} // namespace ico
