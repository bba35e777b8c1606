#pragma once

// Rational polynomials, characteristic polynomials, and Sturm-sequence root
// isolation. This is the only bridge from exact data to real quantities like
// operator norms: every real output comes with a rational interval enclosure.

#include "thetastrat/linalg.hpp"

#include <utility>
#include <vector>

namespace thetastrat {

// coeffs[k] is the coefficient of x^k; normalized so the leading coeff != 0.
struct QPoly {
    std::vector<Rational> c;

    int degree() const { return static_cast<int>(c.size()) - 1; }

    void trim() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }

    Rational eval(const Rational& x) const {
        Rational r = 0;
        for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
        return r;
    }

    QPoly derivative() const {
        QPoly d;
        for (size_t k = 1; k < c.size(); ++k) d.c.push_back(Rational(static_cast<long>(k)) * c[k]);
        return d;
    }

    bool is_zero() const { return c.empty(); }
};

inline QPoly poly_rem(QPoly a, const QPoly& b) {
    while (!a.is_zero() && a.degree() >= b.degree()) {
        Rational f = a.c.back() / b.c.back();
        int shift = a.degree() - b.degree();
        for (int k = 0; k <= b.degree(); ++k) a.c[k + shift] -= f * b.c[k];
        a.trim();
    }
    return a;
}

// char poly of an n x n matrix via Faddeev-LeVerrier; exact over Q.
inline QPoly char_poly(const QMat& m) {
    int n = m.rows;
    QPoly p;
    p.c.assign(n + 1, Rational(0));
    p.c[n] = 1;
    QMat mk = QMat::zero(n, n);
    Rational ck = 1;
    for (int k = 1; k <= n; ++k) {
        // M_k = A*(M_{k-1} + c_{k-1} I)
        for (int i = 0; i < n; ++i) mk(i, i) += ck;
        mk = mat_mul(m, mk);
        Rational tr = 0;
        for (int i = 0; i < n; ++i) tr += mk(i, i);
        ck = -tr / k;
        p.c[n - k] = ck;
    }
    return p;
}

// Sturm chain of the squarefree-reduced polynomial; counts distinct roots,
// which is all root isolation needs.
struct SturmChain {
    std::vector<QPoly> seq;

    explicit SturmChain(QPoly p) {
        p.trim();
        if (p.is_zero()) return;
        seq.push_back(p);
        QPoly d = p.derivative();
        d.trim();
        if (d.is_zero()) return;
        seq.push_back(d);
        while (true) {
            QPoly r = poly_rem(seq[seq.size() - 2], seq.back());
            r.trim();
            if (r.is_zero()) break;
            for (auto& q : r.c) q = -q;
            seq.push_back(std::move(r));
        }
    }

    int sign_changes(const Rational& x) const {
        int changes = 0, prev = 0;
        for (const auto& p : seq) {
            int s = sign(p.eval(x));
            if (s == 0) continue;
            if (prev != 0 && s != prev) ++changes;
            prev = s;
        }
        return changes;
    }

    // number of distinct roots in (a, b]
    int count_roots(const Rational& a, const Rational& b) const {
        if (seq.empty()) return 0;
        return sign_changes(a) - sign_changes(b);
    }
};

// Cauchy bound: all real roots lie in [-B, B].
inline Rational root_bound(const QPoly& p) {
    Rational b = 0;
    const Rational& lead = p.c.back();
    for (int k = 0; k < p.degree(); ++k) {
        Rational q = abs(p.c[k] / lead);
        if (q > b) b = q;
    }
    return b + 1;
}

struct Interval {
    Rational lo, hi;
    Rational width() const { return hi - lo; }
};

// Certified enclosure of the largest real root, or nullopt when p has none.
inline std::optional<Interval> max_real_root(const QPoly& p0, const Rational& tol) {
    QPoly p = p0;
    p.trim();
    if (p.is_zero() || p.degree() == 0) return std::nullopt;
    SturmChain chain(p);
    Rational bound = root_bound(p);
    if (chain.count_roots(-bound, bound) == 0) return std::nullopt;
    Rational lo = -bound, hi = bound;
    // invariant: count(lo, hi] >= 1 and no roots in (hi, bound]
    while (hi - lo > tol) {
        Rational mid = (lo + hi) / 2;
        if (chain.count_roots(mid, hi) >= 1)
            lo = mid;
        else
            hi = mid;
    }
    return Interval{lo, hi};
}

inline std::optional<Interval> min_real_root(const QPoly& p0, const Rational& tol) {
    QPoly q = p0;
    q.trim();
    // reflect x -> -x
    for (size_t k = 1; k < q.c.size(); k += 2) q.c[k] = -q.c[k];
    auto r = max_real_root(q, tol);
    if (!r) return std::nullopt;
    return Interval{-r->hi, -r->lo};
}

// Enclosure of max |root| over the real roots of p (all eigenvalues of the
// self-adjoint operators fed in here are real). Zero when no roots exist.
inline Interval max_abs_root(const QPoly& p, const Rational& tol) {
    auto mx = max_real_root(p, tol);
    auto mn = min_real_root(p, tol);
    if (!mx) return {Rational(0), Rational(0)};
    Interval a{mx->lo < 0 ? Rational(0) : mx->lo, abs(mx->hi) > abs(mx->lo) ? abs(mx->hi) : abs(mx->lo)};
    Interval b{mn->hi > 0 ? Rational(0) : -mn->hi, abs(mn->hi) > abs(mn->lo) ? abs(mn->hi) : abs(mn->lo)};
    Interval m{a.lo > b.lo ? a.lo : b.lo, a.hi > b.hi ? a.hi : b.hi};
    if (m.lo > m.hi) m.lo = m.hi;
    return m;
}

// Smallest *positive* real root enclosure, used for smallest nonzero
// eigenvalues of PSD forms: pass the char poly divided by x^k beforehand.
inline std::optional<Interval> min_positive_root(const QPoly& p0, const Rational& tol) {
    QPoly p = p0;
    p.trim();
    if (p.is_zero() || p.degree() == 0) return std::nullopt;
    SturmChain chain(p);
    Rational bound = root_bound(p);
    Rational eps = 0;
    if (chain.count_roots(eps, bound) == 0) return std::nullopt;
    Rational lo = eps, hi = bound;
    // invariant: count(lo, hi] >= 1 and no roots in (lo_prev, lo]
    while (hi - lo > tol) {
        Rational mid = (lo + hi) / 2;
        if (chain.count_roots(lo, mid) >= 1)
            hi = mid;
        else
            lo = mid;
    }
    return Interval{lo, hi};
}

// Definiteness of an exact symmetric matrix, certified by leading principal
// minors (strict cases) or by characteristic-polynomial sign patterns (the
// semidefinite cases; symmetric matrices have real spectra).
enum class Definiteness { positive, negative, positive_semi, negative_semi, indefinite, zero };

inline Definiteness classify_form(const QMat& s) {
    int n = s.rows;
    bool all_zero = true;
    for (const auto& q : s.a)
        if (q != 0) all_zero = false;
    if (all_zero) return Definiteness::zero;

    auto leading_minors = [&]() {
        std::vector<Rational> mins;
        for (int k = 1; k <= n; ++k) {
            QMat sub(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) sub(i, j) = s(i, j);
            mins.push_back(det(sub));
        }
        return mins;
    };
    auto mins = leading_minors();
    bool pos = true, neg = true;
    for (int k = 1; k <= n; ++k) {
        if (mins[k - 1] <= 0) pos = false;
        if ((k % 2 == 1 && mins[k - 1] >= 0) || (k % 2 == 0 && mins[k - 1] <= 0)) neg = false;
    }
    if (pos) return Definiteness::positive;
    if (neg) return Definiteness::negative;

    // all roots >= 0 iff the char poly coefficients have signs in {0, (-1)^{n-k}}
    QPoly p = char_poly(s);
    bool psd = true, nsd = true;
    for (int k = 0; k <= p.degree(); ++k) {
        int sg = sign(p.c[k]);
        if (sg == 0) continue;
        int want_psd = ((p.degree() - k) % 2 == 0) ? 1 : -1;
        if (sg != want_psd) psd = false;
        if (sg != 1) nsd = false;  // all roots <= 0 iff all coefficients >= 0
    }
    if (psd) return Definiteness::positive_semi;
    if (nsd) return Definiteness::negative_semi;
    return Definiteness::indefinite;
}

}  // namespace thetastrat
