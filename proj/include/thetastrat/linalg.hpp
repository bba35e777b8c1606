#pragma once

// Dense exact linear algebra over Q, sized for root-datum ranks (n <= ~8).

#include "thetastrat/numeric.hpp"

#include <algorithm>
#include <optional>
#include <vector>

namespace thetastrat {

using QVec = std::vector<Rational>;

struct QMat {
    int rows = 0, cols = 0;
    std::vector<Rational> a;  // row-major

    QMat() = default;
    QMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    Rational& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Rational& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static QMat identity(int n) {
        QMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
    static QMat zero(int r, int c) { return QMat(r, c); }

    bool operator==(const QMat& o) const { return rows == o.rows && cols == o.cols && a == o.a; }
};

inline QVec operator+(const QVec& x, const QVec& y) {
    QVec r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
    return r;
}
inline QVec operator-(const QVec& x, const QVec& y) {
    QVec r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
    return r;
}
inline QVec operator*(const Rational& c, const QVec& x) {
    QVec r(x.size());
    for (size_t i = 0; i < x.size(); ++i) r[i] = c * x[i];
    return r;
}
inline QVec operator-(const QVec& x) { return Rational(-1) * x; }

inline bool is_zero(const QVec& x) {
    return std::all_of(x.begin(), x.end(), [](const Rational& q) { return q == 0; });
}

inline Rational dot(const QVec& x, const QVec& y) {
    Rational s = 0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline QVec mat_vec(const QMat& m, const QVec& v) {
    QVec r(m.rows, Rational(0));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j)
            if (m(i, j) != 0 && v[j] != 0) r[i] += m(i, j) * v[j];
    return r;
}

inline QMat mat_mul(const QMat& x, const QMat& y) {
    QMat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const Rational& v = x(i, k);
            if (v == 0) continue;
            for (int j = 0; j < y.cols; ++j)
                if (y(k, j) != 0) r(i, j) += v * y(k, j);
        }
    return r;
}

inline QMat mat_add(const QMat& x, const QMat& y) {
    QMat r(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}
inline QMat mat_sub(const QMat& x, const QMat& y) {
    QMat r(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}
inline QMat mat_scale(const Rational& c, const QMat& x) {
    QMat r(x.rows, x.cols);
    for (size_t i = 0; i < x.a.size(); ++i) r.a[i] = c * x.a[i];
    return r;
}

inline QMat transpose(const QMat& m) {
    QMat r(m.cols, m.rows);
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) r(j, i) = m(i, j);
    return r;
}

inline QMat from_columns(const std::vector<QVec>& cols, int rows) {
    QMat m(rows, static_cast<int>(cols.size()));
    for (int j = 0; j < m.cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = cols[j][i];
    return m;
}

inline QVec column(const QMat& m, int j) {
    QVec v(m.rows);
    for (int i = 0; i < m.rows; ++i) v[i] = m(i, j);
    return v;
}

inline QVec row(const QMat& m, int i) {
    QVec v(m.cols);
    for (int j = 0; j < m.cols; ++j) v[j] = m(i, j);
    return v;
}

// In-place fraction-free-ish Gauss-Jordan; returns pivot columns.
inline std::vector<int> rref(QMat& m) {
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols && r < m.rows; ++c) {
        int p = -1;
        for (int i = r; i < m.rows; ++i)
            if (m(i, c) != 0) { p = i; break; }
        if (p < 0) continue;
        if (p != r)
            for (int j = 0; j < m.cols; ++j) std::swap(m(p, j), m(r, j));
        Rational inv = Rational(1) / m(r, c);
        for (int j = 0; j < m.cols; ++j) m(r, j) *= inv;
        for (int i = 0; i < m.rows; ++i) {
            if (i == r || m(i, c) == 0) continue;
            Rational f = m(i, c);
            for (int j = 0; j < m.cols; ++j) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

inline int rank(QMat m) { return static_cast<int>(rref(m).size()); }

inline Rational det(QMat m) {
    if (m.rows != m.cols) throw std::invalid_argument("det of non-square matrix");
    Rational d = 1;
    for (int c = 0; c < m.cols; ++c) {
        int p = -1;
        for (int i = c; i < m.rows; ++i)
            if (m(i, c) != 0) { p = i; break; }
        if (p < 0) return Rational(0);
        if (p != c) {
            for (int j = 0; j < m.cols; ++j) std::swap(m(p, j), m(c, j));
            d = -d;
        }
        d *= m(c, c);
        Rational inv = Rational(1) / m(c, c);
        for (int i = c + 1; i < m.rows; ++i) {
            if (m(i, c) == 0) continue;
            Rational f = m(i, c) * inv;
            for (int j = c; j < m.cols; ++j) m(i, j) -= f * m(c, j);
        }
    }
    return d;
}

inline std::optional<QMat> inverse(const QMat& m) {
    if (m.rows != m.cols) throw std::invalid_argument("inverse of non-square matrix");
    int n = m.rows;
    QMat aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) aug(i, j) = m(i, j);
        aug(i, n + i) = 1;
    }
    auto piv = rref(aug);
    if (static_cast<int>(piv.size()) < n || piv[n - 1] >= n) {
        if (static_cast<int>(piv.size()) != n) return std::nullopt;
    }
    for (int k = 0; k < n; ++k)
        if (piv[k] != k) return std::nullopt;
    QMat inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
    return inv;
}

// Solve m x = b; nullopt if inconsistent. Free variables set to 0.
inline std::optional<QVec> solve(const QMat& m, const QVec& b) {
    QMat aug(m.rows, m.cols + 1);
    for (int i = 0; i < m.rows; ++i) {
        for (int j = 0; j < m.cols; ++j) aug(i, j) = m(i, j);
        aug(i, m.cols) = b[i];
    }
    auto piv = rref(aug);
    for (size_t k = 0; k < piv.size(); ++k)
        if (piv[k] == m.cols) return std::nullopt;
    QVec x(m.cols, Rational(0));
    for (size_t k = 0; k < piv.size(); ++k) x[piv[k]] = aug(static_cast<int>(k), m.cols);
    return x;
}

// Basis of { x : m x = 0 }.
inline std::vector<QVec> kernel_basis(QMat m) {
    auto piv = rref(m);
    std::vector<bool> is_piv(m.cols, false);
    for (int c : piv) is_piv[c] = true;
    std::vector<QVec> basis;
    for (int c = 0; c < m.cols; ++c) {
        if (is_piv[c]) continue;
        QVec v(m.cols, Rational(0));
        v[c] = 1;
        for (size_t k = 0; k < piv.size(); ++k) v[piv[k]] = -m(static_cast<int>(k), c);
        basis.push_back(std::move(v));
    }
    return basis;
}

// Column-space basis (subset of the input vectors).
inline std::vector<QVec> column_space_basis(const std::vector<QVec>& vecs, int dim) {
    std::vector<QVec> basis;
    QMat m(dim, 0);
    for (const auto& v : vecs) {
        std::vector<QVec> trial = basis;
        trial.push_back(v);
        QMat t = from_columns(trial, dim);
        if (rank(t) == static_cast<int>(trial.size())) basis.push_back(v);
    }
    return basis;
}

inline bool in_span(const std::vector<QVec>& basis, const QVec& v, int dim) {
    if (is_zero(v)) return true;
    if (basis.empty()) return false;
    QMat m = from_columns(basis, dim);
    return solve(m, v).has_value();
}

// Scale a rational vector to a primitive integer vector (unique up to sign;
// the sign of the first nonzero entry is kept).
inline QVec primitive(const QVec& v) {
    Int lcm = 1;
    for (const auto& q : v) lcm = boost::multiprecision::lcm(lcm, denominator(q));
    std::vector<Int> w(v.size());
    Int g = 0;
    for (size_t i = 0; i < v.size(); ++i) {
        w[i] = numerator(v[i]) * (lcm / denominator(v[i]));
        g = boost::multiprecision::gcd(g, w[i]);
    }
    if (g == 0) return QVec(v.size(), Rational(0));
    QVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = Rational(w[i] / g);
    return r;
}

}  // namespace thetastrat
