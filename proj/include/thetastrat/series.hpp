#pragma once

// Truncated multivariate formal power series: polynomial variables t, s and a
// signed grading variable q, with Laurent z-monomial tags (exponent vectors
// over the central character lattice). Complex coefficients at the configured
// working precision; the order-doubling Newton solver lives here too.

#include "thetastrat/bigfloat.hpp"
#include "thetastrat/linalg.hpp"

#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace thetastrat {

struct Monomial {
    int t = 0, s = 0;
    Rational q{0};
    std::vector<Rational> z;  // exponent vector; dimension fixed per series

    bool operator==(const Monomial& o) const { return t == o.t && s == o.s && q == o.q && z == o.z; }
    bool operator<(const Monomial& o) const {
        if (t != o.t) return t < o.t;
        if (s != o.s) return s < o.s;
        if (q != o.q) return q < o.q;
        if (z.size() != o.z.size()) return z.size() < o.z.size();
        for (size_t i = 0; i < z.size(); ++i)
            if (z[i] != o.z[i]) return z[i] < o.z[i];
        return false;
    }

    // canonical form: no trailing zero z-exponents
    Monomial& normalize() {
        while (!z.empty() && z.back() == 0) z.pop_back();
        return *this;
    }

    Monomial operator*(const Monomial& o) const {
        Monomial r;
        r.t = t + o.t;
        r.s = s + o.s;
        r.q = q + o.q;
        r.z = z.size() >= o.z.size() ? z : o.z;
        const auto& small = z.size() >= o.z.size() ? o.z : z;
        for (size_t i = 0; i < small.size(); ++i) r.z[i] += small[i];
        return r.normalize(), r;
    }

    bool is_unit() const {
        if (t || s || q != 0) return false;
        return std::all_of(z.begin(), z.end(), [](const Rational& e) { return e == 0; });
    }
};

struct Truncation {
    int t_order = 8;
    int t_floor = 0;       // lowest kept t-exponent (negative in graded slices)
    int s_order = 2;
    Rational q_window{0};  // keep |q| <= q_window; 0 disables the q variable

    bool keeps(const Monomial& m) const {
        if (m.t > t_order || m.t < t_floor || m.s > s_order) return false;
        if (abs(m.q) > q_window) return false;
        return true;
    }
    bool operator==(const Truncation& o) const {
        return t_order == o.t_order && t_floor == o.t_floor && s_order == o.s_order &&
               q_window == o.q_window;
    }
};

class TruncatedSeries {
  public:
    Truncation trunc;
    std::map<Monomial, Cplx> terms;

    TruncatedSeries() = default;
    explicit TruncatedSeries(Truncation tr) : trunc(tr) {}

    static TruncatedSeries constant(const Cplx& c, Truncation tr) {
        TruncatedSeries r(tr);
        if (!c.is_zero()) r.terms[{}] = c;
        return r;
    }
    static TruncatedSeries one(Truncation tr) { return constant(Cplx(1), tr); }
    static TruncatedSeries monomial(Monomial m, const Cplx& c, Truncation tr) {
        TruncatedSeries r(tr);
        m.normalize();
        if (tr.keeps(m) && !c.is_zero()) r.terms[m] = c;
        return r;
    }

    bool is_zero() const { return terms.empty(); }

    Cplx coefficient(const Monomial& m) const {
        auto it = terms.find(m);
        return it == terms.end() ? Cplx() : it->second;
    }
    Cplx constant_term() const { return coefficient(Monomial{}); }

    // every monomial is a non-unit: powers eventually leave the truncation box
    bool has_positive_valuation() const {
        for (const auto& [m, c] : terms)
            if (m.is_unit()) return false;
        return true;
    }

    TruncatedSeries& prune() {
        for (auto it = terms.begin(); it != terms.end();)
            it = it->second.is_zero() ? terms.erase(it) : std::next(it);
        return *this;
    }

    TruncatedSeries operator+(const TruncatedSeries& o) const {
        check(o);
        TruncatedSeries r = *this;
        for (const auto& [m, c] : o.terms) {
            auto [it, fresh] = r.terms.try_emplace(m, c);
            if (!fresh) it->second += c;
        }
        return r.prune();
    }
    TruncatedSeries operator-(const TruncatedSeries& o) const {
        check(o);
        TruncatedSeries r = *this;
        for (const auto& [m, c] : o.terms) {
            auto [it, fresh] = r.terms.try_emplace(m, -c);
            if (!fresh) it->second -= c;
        }
        return r.prune();
    }
    TruncatedSeries operator-() const {
        TruncatedSeries r = *this;
        for (auto& [m, c] : r.terms) c = -c;
        return r;
    }
    TruncatedSeries operator*(const TruncatedSeries& o) const {
        check(o);
        TruncatedSeries r(trunc);
        for (const auto& [m1, c1] : terms)
            for (const auto& [m2, c2] : o.terms) {
                Monomial m = m1 * m2;
                if (!trunc.keeps(m)) continue;
                Cplx prod = c1 * c2;
                auto [it, fresh] = r.terms.try_emplace(m, prod);
                if (!fresh) it->second += prod;
            }
        return r.prune();
    }
    TruncatedSeries scaled(const Cplx& c) const {
        TruncatedSeries r = *this;
        for (auto& [m, v] : r.terms) v *= c;
        return r.prune();
    }
    TruncatedSeries shifted(const Monomial& by) const {
        TruncatedSeries r(trunc);
        for (const auto& [m, c] : terms) {
            Monomial mm = m * by;
            if (trunc.keeps(mm)) r.terms[mm] = c;
        }
        return r;
    }

    // 1/x via order-doubling Newton; needs an invertible constant term. The
    // round-trip x * y = 1 is verified against the working-precision floor.
    TruncatedSeries inverse() const {
        Cplx c0 = constant_term();
        if (c0.is_zero()) throw precondition_error("series inverse needs a nonzero constant term");
        TruncatedSeries y = constant(Cplx(1) / c0, trunc);
        TruncatedSeries two = constant(Cplx(2), trunc);
        int steps = 5;
        for (int k = trunc.t_order + trunc.s_order + 8; k > 0; k /= 2) ++steps;
        for (int i = 0; i < steps; ++i) y = y * (two - *this * y);
        TruncatedSeries resid = *this * y - one(trunc);
        Real floor = precision_floor();
        Real scale = Real(1);
        for (const auto& [m, c] : terms) {
            Real a = c.abs();
            if (a > scale) scale = a;
        }
        for (const auto& [m, c] : resid.terms)
            if (c.abs() >= floor * scale)
                throw precondition_error("series inverse failed to converge (mixed-valuation input?)");
        return y;
    }

    static Real precision_floor() {
        Real floor = Real(1);
        unsigned bits = default_precision_bits();
        for (unsigned i = 0; i + 24 < bits; ++i) floor /= 2;
        return floor;
    }

    TruncatedSeries pow(long e) const {
        if (e == 0) return one(trunc);
        TruncatedSeries base = e > 0 ? *this : inverse();
        long n = e > 0 ? e : -e;
        TruncatedSeries r = one(trunc);
        while (n > 0) {
            if (n & 1) r = r * base;
            base = base * base;
            n >>= 1;
        }
        return r;
    }

    void check(const TruncatedSeries& o) const {
        if (!(trunc == o.trunc))
            throw precondition_error("series truncation mismatch");
    }

    std::string str(int digits = 8) const {
        std::ostringstream os;
        bool first = true;
        for (const auto& [m, c] : terms) {
            if (!first) os << " + ";
            first = false;
            os << "(" << to_string(c, digits) << ")";
            if (m.t) os << " t^" << m.t;
            if (m.s) os << " s^" << m.s;
            if (m.q != 0) os << " q^" << to_string(m.q);
            for (size_t i = 0; i < m.z.size(); ++i)
                if (m.z[i] != 0) os << " z" << i << "^" << to_string(m.z[i]);
        }
        return first ? "0" : os.str();
    }
};

// exp of a series with no constant term.
inline TruncatedSeries series_exp(const TruncatedSeries& x) {
    if (!x.has_positive_valuation())
        throw precondition_error("series exp needs zero constant term");
    TruncatedSeries r = TruncatedSeries::one(x.trunc);
    TruncatedSeries pw = TruncatedSeries::one(x.trunc);
    Real fact(1);
    for (int k = 1; k <= 1000; ++k) {
        pw = pw * x;
        if (pw.is_zero()) return r;
        fact *= k;
        r = r + pw.scaled(Cplx(Real(1) / fact));
    }
    throw precondition_error("series exp did not terminate; argument has unit-box monomials");
}

// log(1 + u) for u without constant term.
inline TruncatedSeries series_log1p(const TruncatedSeries& u) {
    if (!u.has_positive_valuation())
        throw precondition_error("series log needs zero constant term");
    TruncatedSeries r(u.trunc);
    TruncatedSeries pw = TruncatedSeries::one(u.trunc);
    for (int k = 1; k <= 1000; ++k) {
        pw = pw * u;
        if (pw.is_zero()) return r;
        Real coeff = Real(k % 2 == 1 ? 1 : -1) / k;
        r = r + pw.scaled(Cplx(coeff));
    }
    throw precondition_error("series log did not terminate; argument has unit-box monomials");
}

using SeriesVector = std::vector<TruncatedSeries>;

inline SeriesVector operator+(const SeriesVector& a, const SeriesVector& b) {
    SeriesVector r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}
inline SeriesVector operator-(const SeriesVector& a, const SeriesVector& b) {
    SeriesVector r(a.size());
    for (size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

struct SeriesMatrix {
    int n = 0;
    std::vector<TruncatedSeries> a;  // row-major n x n

    SeriesMatrix(int nn, Truncation tr) : n(nn), a(static_cast<size_t>(nn) * nn, TruncatedSeries(tr)) {}
    TruncatedSeries& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
    const TruncatedSeries& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

    static SeriesMatrix identity(int nn, Truncation tr) {
        SeriesMatrix m(nn, tr);
        for (int i = 0; i < nn; ++i) m(i, i) = TruncatedSeries::one(tr);
        return m;
    }

    TruncatedSeries det() const {
        if (n == 0) return TruncatedSeries::one(a.empty() ? Truncation{} : a[0].trunc);
        if (n == 1) return (*this)(0, 0);
        // Laplace expansion along the first row; ranks here are tiny
        TruncatedSeries r(a[0].trunc);
        for (int j = 0; j < n; ++j) {
            if ((*this)(0, j).is_zero()) continue;
            SeriesMatrix minor(n - 1, a[0].trunc);
            for (int i = 1; i < n; ++i) {
                int cc = 0;
                for (int c = 0; c < n; ++c) {
                    if (c == j) continue;
                    minor(i - 1, cc++) = (*this)(i, c);
                }
            }
            TruncatedSeries term = (*this)(0, j) * minor.det();
            r = (j % 2 == 0) ? r + term : r - term;
        }
        return r;
    }
};

// Apply an exact rational matrix to a series vector.
inline SeriesVector apply_rational_matrix(const QMat& m, const SeriesVector& v, Truncation tr) {
    SeriesVector r(m.rows, TruncatedSeries(tr));
    for (int i = 0; i < m.rows; ++i)
        for (int j = 0; j < m.cols; ++j) {
            if (m(i, j) == 0 || v[j].is_zero()) continue;
            r[i] = r[i] + v[j].scaled(Cplx(from_rational(m(i, j))));
        }
    return r;
}

struct FixedPointOptions {
    int max_iterations = 0;  // 0: derive from the truncation order
    Real residual_floor = Real(0);  // 0: derive from the working precision
};

// Solve F(xi) = 0 for a series vector regular at the origin by Newton steps
// with the constant Jacobian J0: xi <- xi - J0^{-1} F(xi); the residual
// valuation doubles each step.
inline SeriesVector solve_fixed_point(const std::function<SeriesVector(const SeriesVector&)>& f,
                                      const QMat& j0, int dim, Truncation tr,
                                      FixedPointOptions opt = {}) {
    auto j0_inv = inverse(j0);
    if (!j0_inv) throw precondition_error("solve_fixed_point: singular constant Jacobian");
    // The frozen-Jacobian iteration gains at least one valuation step per
    // pass (the J - J0 difference has positive valuation), so the default
    // budget is linear in the truncation order.
    int iters = opt.max_iterations;
    if (iters == 0)
        iters = tr.t_order + tr.s_order + 2 * (rat_ceil(tr.q_window).convert_to<int>()) + 8;
    Real floor = opt.residual_floor;
    if (floor == 0) floor = TruncatedSeries::precision_floor();
    SeriesVector xi(dim, TruncatedSeries(tr));
    for (int it = 0; it < iters; ++it) {
        SeriesVector resid = f(xi);
        Real worst(0);
        for (const auto& comp : resid)
            for (const auto& [m, c] : comp.terms) {
                Real a = c.abs();
                if (a > worst) worst = a;
            }
        if (worst < floor) return xi;
        xi = xi - apply_rational_matrix(*j0_inv, resid, tr);
    }
    // final check
    SeriesVector resid = f(xi);
    for (const auto& comp : resid)
        for (const auto& [m, c] : comp.terms)
            if (c.abs() >= floor)
                throw precondition_error(
                    "solve_fixed_point did not converge: residual " + to_string(c, 8));
    return xi;
}

}  // namespace thetastrat
