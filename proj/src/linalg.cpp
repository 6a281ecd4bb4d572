#include "ico/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace ico {

Mat operator*(const Mat& x, const Mat& y) {
    assert(x.n == y.n);
    Mat r = Mat::zero(x.n);
    for (int i = 0; i < x.n; ++i)
        for (int k = 0; k < x.n; ++k) {
            const double xik = x.at(i, k);
            if (xik == 0.0) continue;
            for (int j = 0; j < x.n; ++j) r.at(i, j) += xik * y.at(k, j);
        }
    return r;
}

Vec operator*(const Mat& m, const Vec& v) {
    assert(m.n == v.n);
    Vec r = Vec::zero(m.n);
    for (int i = 0; i < m.n; ++i) {
        double s = 0;
        for (int j = 0; j < m.n; ++j) s += m.at(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

Mat operator+(const Mat& x, const Mat& y) {
    assert(x.n == y.n);
    Mat r = x;
    for (int i = 0; i < x.n * x.n; ++i) r.a[i] += y.a[i];
    return r;
}

Mat operator-(const Mat& x, const Mat& y) {
    assert(x.n == y.n);
    Mat r = x;
    for (int i = 0; i < x.n * x.n; ++i) r.a[i] -= y.a[i];
    return r;
}

Mat operator*(double s, Mat m) {
    for (int i = 0; i < m.n * m.n; ++i) m.a[i] *= s;
    return m;
}

Mat transpose(const Mat& m) {
    Mat r = Mat::zero(m.n);
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j) r.at(j, i) = m.at(i, j);
    return r;
}

namespace {

// LU with partial pivoting on a copy; returns permutation sign, or 0 when
// the matrix is numerically singular.
int lu_decompose(Mat& m, std::array<int, kMaxDim>& perm) {
    const int n = m.n;
    int sign = 1;
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        double best = std::fabs(m.at(col, col));
        for (int r = col + 1; r < n; ++r) {
            const double v = std::fabs(m.at(r, col));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-300) return 0;
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(m.at(piv, j), m.at(col, j));
            std::swap(perm[piv], perm[col]);
            sign = -sign;
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = m.at(r, col) / m.at(col, col);
            m.at(r, col) = f;
            for (int j = col + 1; j < n; ++j) m.at(r, j) -= f * m.at(col, j);
        }
    }
    return sign;
}

} // namespace

double det(const Mat& m) {
    Mat lu = m;
    std::array<int, kMaxDim> perm{};
    const int sign = lu_decompose(lu, perm);
    if (sign == 0) return 0.0;
    double d = sign;
    for (int i = 0; i < m.n; ++i) d *= lu.at(i, i);
    return d;
}

Vec solve(const Mat& A, const Vec& b) {
    assert(A.n == b.n);
    Mat lu = A;
    std::array<int, kMaxDim> perm{};
    if (lu_decompose(lu, perm) == 0) throw NumericError("linear solve: singular matrix");
    const int n = A.n;
    Vec x = Vec::zero(n);
    for (int i = 0; i < n; ++i) x[i] = b[perm[i]];
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) x[i] -= lu.at(i, j) * x[j];
    for (int i = n - 1; i >= 0; --i) {
        for (int j = i + 1; j < n; ++j) x[i] -= lu.at(i, j) * x[j];
        x[i] /= lu.at(i, i);
    }
    return x;
}

Mat inverse(const Mat& m) {
    const int n = m.n;
    Mat inv = Mat::zero(n);
    Mat lu = m;
    std::array<int, kMaxDim> perm{};
    if (lu_decompose(lu, perm) == 0) throw NumericError("matrix inverse: singular matrix");
    for (int col = 0; col < n; ++col) {
        Vec e = Vec::zero(n);
        for (int i = 0; i < n; ++i) e[i] = (perm[i] == col) ? 1.0 : 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) e[i] -= lu.at(i, j) * e[j];
        for (int i = n - 1; i >= 0; --i) {
            for (int j = i + 1; j < n; ++j) e[i] -= lu.at(i, j) * e[j];
            e[i] /= lu.at(i, i);
        }
        for (int i = 0; i < n; ++i) inv.at(i, col) = e[i];
    }
    return inv;
}

Mat congruence(const Mat& a, const Mat& g) { return transpose(a) * g * a; }

double max_abs_diff(const Mat& x, const Mat& y) {
    assert(x.n == y.n);
    double m = 0;
    for (int i = 0; i < x.n * x.n; ++i) m = std::max(m, std::fabs(x.a[i] - y.a[i]));
    return m;
}

double max_abs(const Mat& x) {
    double m = 0;
    for (int i = 0; i < x.n * x.n; ++i) m = std::max(m, std::fabs(x.a[i]));
    return m;
}

EigenSym eigen_sym(const Mat& m) {
    const int n = m.n;
    Mat a = m;
    Mat q = Mat::identity(n);

    auto off_norm = [&]() {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += a.at(i, j) * a.at(i, j);
        return s;
    };

    for (int sweep = 0; sweep < 100 && off_norm() > 1e-30; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int r = p + 1; r < n; ++r) {
                const double apq = a.at(p, r);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = (a.at(r, r) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a.at(k, p), akq = a.at(k, r);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, r) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a.at(p, k), aqk = a.at(r, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(r, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double qkp = q.at(k, p), qkq = q.at(k, r);
                    q.at(k, p) = c * qkp - s * qkq;
                    q.at(k, r) = s * qkp + c * qkq;
                }
            }
    }

    // sort ascending
    std::array<int, kMaxDim> order{};
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.begin() + n,
              [&](int i, int j) { return a.at(i, i) < a.at(j, j); });

    EigenSym out;
    out.values = Vec::zero(n);
    out.vectors = Mat::zero(n);
    for (int k = 0; k < n; ++k) {
        out.values[k] = a.at(order[k], order[k]);
        for (int i = 0; i < n; ++i) out.vectors.at(i, k) = q.at(i, order[k]);
    }
    return out;
}

Mat minkowski_eta(int dim) {
    Mat eta = Mat::identity(dim);
    eta.at(0, 0) = -1.0;
    return eta;
}

bool is_lorentzian(const Mat& g, double sym_tol) {
    for (int i = 0; i < g.n; ++i)
        for (int j = i + 1; j < g.n; ++j)
            if (std::fabs(g.at(i, j) - g.at(j, i)) > sym_tol) return false;
    const EigenSym e = eigen_sym(g);
    int negatives = 0;
    for (int i = 0; i < g.n; ++i) {
        if (e.values[i] < 0) ++negatives;
        if (std::fabs(e.values[i]) < 1e-14) return false;
    }
    return negatives == 1;
}

Mat outer(const Vec& u, const Vec& v) {
    assert(u.n == v.n);
    Mat r = Mat::zero(u.n);
    for (int i = 0; i < u.n; ++i)
        for (int j = 0; j < u.n; ++j) r.at(i, j) = u[i] * v[j];
    return r;
}

} // namespace ico
