#pragma once

// Integer-lattice utilities: Smith normal form, coset enumeration, integer
// kernels. Everything is exact over Z.

#include "thetastrat/linalg.hpp"

#include <vector>

namespace thetastrat {

struct ZMat {
    int rows = 0, cols = 0;
    std::vector<Int> a;

    ZMat() = default;
    ZMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
    Int& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const Int& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static ZMat identity(int n) {
        ZMat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }
};

inline QMat to_qmat(const ZMat& z) {
    QMat m(z.rows, z.cols);
    for (int i = 0; i < z.rows; ++i)
        for (int j = 0; j < z.cols; ++j) m(i, j) = Rational(z(i, j));
    return m;
}

// Smith normal form: U*A*V = D with U, V unimodular, D diagonal with
// d_1 | d_2 | ... >= 0. Returns (D, U, V).
struct SmithForm {
    ZMat d, u, v;
};

inline SmithForm smith_normal_form(ZMat a) {
    const int m = a.rows, n = a.cols;
    ZMat u = ZMat::identity(m), v = ZMat::identity(n);

    auto row_op = [&](int i, int k, const Int& f) {  // row_i -= f * row_k
        for (int j = 0; j < n; ++j) a(i, j) -= f * a(k, j);
        for (int j = 0; j < m; ++j) u(i, j) -= f * u(k, j);
    };
    auto col_op = [&](int j, int k, const Int& f) {  // col_j -= f * col_k
        for (int i = 0; i < m; ++i) a(i, j) -= f * a(i, k);
        for (int i = 0; i < n; ++i) v(i, j) -= f * v(i, k);
    };
    auto row_swap = [&](int i, int k) {
        if (i == k) return;
        for (int j = 0; j < n; ++j) std::swap(a(i, j), a(k, j));
        for (int j = 0; j < m; ++j) std::swap(u(i, j), u(k, j));
    };
    auto col_swap = [&](int j, int k) {
        if (j == k) return;
        for (int i = 0; i < m; ++i) std::swap(a(i, j), a(i, k));
        for (int i = 0; i < n; ++i) std::swap(v(i, j), v(i, k));
    };

    auto diagonalize = [&]() {
        int t = 0;
        while (t < m && t < n) {
            int pi = -1, pj = -1;
            for (int i = t; i < m; ++i)
                for (int j = t; j < n; ++j)
                    if (a(i, j) != 0 &&
                        (pi < 0 || boost::multiprecision::abs(a(i, j)) <
                                       boost::multiprecision::abs(a(pi, pj)))) {
                        pi = i;
                        pj = j;
                    }
            if (pi < 0) break;
            row_swap(t, pi);
            col_swap(t, pj);
            bool dirty = true;
            while (dirty) {
                dirty = false;
                for (int i = t + 1; i < m; ++i) {
                    if (a(i, t) == 0) continue;
                    row_op(i, t, floor_div(a(i, t), a(t, t)));
                    if (a(i, t) != 0) { row_swap(t, i); dirty = true; }
                }
                for (int j = t + 1; j < n; ++j) {
                    if (a(t, j) == 0) continue;
                    col_op(j, t, floor_div(a(t, j), a(t, t)));
                    if (a(t, j) != 0) { col_swap(t, j); dirty = true; }
                }
            }
            ++t;
        }
        return t;
    };

    int t = diagonalize();
    // Enforce the divisibility chain: mixing column j into column i couples
    // the two diagonal entries; re-diagonalizing replaces them by gcd/lcm.
    bool chain_ok = false;
    while (!chain_ok) {
        chain_ok = true;
        for (int i = 0; i + 1 < t && chain_ok; ++i)
            for (int j = i + 1; j < t && chain_ok; ++j)
                if (a(j, j) % a(i, i) != 0) {
                    col_op(i, j, Int(-1));
                    diagonalize();
                    chain_ok = false;
                }
    }
    for (int i = 0; i < std::min(m, n); ++i)
        if (a(i, i) < 0) {
            for (int j = 0; j < n; ++j) a(i, j) = -a(i, j);
            for (int j = 0; j < m; ++j) u(i, j) = -u(i, j);
        }
    return {a, u, v};
}

// Representatives of Z^n / B Z^n for an integer matrix B with det != 0.
// x ~ y  iff  U x == U y mod D, so representatives are U^{-1} k with
// k in prod [0, d_i).
inline std::vector<std::vector<Int>> lattice_coset_representatives(const ZMat& b) {
    if (b.rows != b.cols) throw std::invalid_argument("coset enumeration needs a square matrix");
    const int n = b.rows;
    SmithForm s = smith_normal_form(b);
    Int total = 1;
    for (int i = 0; i < n; ++i) {
        if (s.d(i, i) == 0) throw precondition_error("singular matrix in coset enumeration");
        total *= s.d(i, i);
    }
    if (total > 2'000'000) throw precondition_error("coset count too large: " + total.str());
    auto ui = inverse(to_qmat(s.u));
    if (!ui) throw std::logic_error("unimodular matrix not invertible");
    std::vector<std::vector<Int>> reps;
    reps.reserve(total.convert_to<size_t>());
    std::vector<Int> k(n, Int(0));
    while (true) {
        QVec kq(n);
        for (int i = 0; i < n; ++i) kq[i] = Rational(k[i]);
        QVec x = mat_vec(*ui, kq);
        std::vector<Int> xi(n);
        for (int i = 0; i < n; ++i) {
            if (denominator(x[i]) != 1) throw std::logic_error("non-integer coset representative");
            xi[i] = numerator(x[i]);
        }
        reps.push_back(std::move(xi));
        int pos = n - 1;
        while (pos >= 0) {
            ++k[pos];
            if (k[pos] < s.d(pos, pos)) break;
            k[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return reps;
}

// Z-basis of { x in Z^n : A x = 0 } for integer A; the kernel of an integer
// matrix is saturated, so this doubles as the saturation step for character
// sublattices.
inline std::vector<std::vector<Int>> integer_kernel(const ZMat& a) {
    SmithForm s = smith_normal_form(a);
    const int n = a.cols;
    int r = 0;
    for (int i = 0; i < std::min(a.rows, n); ++i)
        if (s.d(i, i) != 0) ++r;
    // A x = 0  iff  D (V^{-1} x) = 0, so the kernel is spanned by the last
    // n - r columns of V.
    std::vector<std::vector<Int>> basis;
    for (int j = r; j < n; ++j) {
        std::vector<Int> col(n);
        for (int i = 0; i < n; ++i) col[i] = s.v(i, j);
        basis.push_back(std::move(col));
    }
    return basis;
}

}  // namespace thetastrat
