#pragma once

// Arbitrary-precision real/complex scalars (MPFR-backed) for the series
// engine. Precision is a process-wide runtime setting; exact rational data
// enters only at evaluation points, via from_rational and unit_root.

#include "thetastrat/numeric.hpp"

#include <boost/multiprecision/mpfr.hpp>

#include <string>

namespace thetastrat {

using Real = boost::multiprecision::mpfr_float;

inline void set_precision_bits(unsigned bits) {
    // boost tracks decimal digits; keep a safety digit
    Real::default_precision(static_cast<unsigned>(bits * 0.30103) + 2);
}

inline unsigned default_precision_bits() {
    return static_cast<unsigned>(Real::default_precision() / 0.30103) + 1;
}

inline Real from_rational(const Rational& q) {
    return Real(numerator(q).str()) / Real(denominator(q).str());
}

struct Cplx {
    Real re, im;

    Cplx() : re(0), im(0) {}
    Cplx(long r) : re(r), im(0) {}
    Cplx(Real r) : re(std::move(r)), im(0) {}
    Cplx(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

    Cplx operator+(const Cplx& o) const { return {re + o.re, im + o.im}; }
    Cplx operator-(const Cplx& o) const { return {re - o.re, im - o.im}; }
    Cplx operator-() const { return {-re, -im}; }
    Cplx operator*(const Cplx& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Cplx operator/(const Cplx& o) const {
        Real d = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
    }
    Cplx& operator+=(const Cplx& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    Cplx& operator-=(const Cplx& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    Cplx& operator*=(const Cplx& o) { return *this = *this * o; }

    Real abs_sq() const { return re * re + im * im; }
    Real abs() const { return boost::multiprecision::sqrt(abs_sq()); }
    bool is_zero() const { return re == 0 && im == 0; }
};

inline Cplx operator*(const Real& s, const Cplx& z) { return {s * z.re, s * z.im}; }

inline Real pi_value() { return acos(Real(-1)); }

// e^{2 pi i q} for exact rational q, evaluated once per use; the only place
// transcendental functions touch the pipeline.
inline Cplx unit_root(const Rational& q) {
    Rational frac = q - Rational(rat_floor(q));
    if (frac == 0) return Cplx(1);
    if (frac == Rational(1, 2)) return Cplx(Real(-1));
    if (frac == Rational(1, 4)) return {Real(0), Real(1)};
    if (frac == Rational(3, 4)) return {Real(0), Real(-1)};
    Real angle = 2 * pi_value() * from_rational(frac);
    return {cos(angle), sin(angle)};
}

// e^{pi i q}: half-angle roots of unity for the Weyl denominator factors.
inline Cplx half_unit_root(const Rational& q) { return unit_root(q / 2); }

inline std::string to_string(const Cplx& z, int digits = 20) {
    std::string s = z.re.str(digits);
    if (!(z.im == 0)) {
        Real a = boost::multiprecision::abs(z.im);
        s += (z.im < 0 ? " - " : " + ") + a.str(digits) + "i";
    }
    return s;
}

// Integer gate: a computed index must round to an integer within the given
// residual; silent drift is a hard error.
inline Int round_to_integer_gate(const Real& x, const Real& max_residual,
                                 const std::string& what) {
    Real r = boost::multiprecision::round(x);
    if (boost::multiprecision::abs(x - r) >= max_residual)
        throw integer_gate_error("integer gate failed for " + what + ": value " + x.str(30) +
                                 " is not within " + max_residual.str(5) + " of an integer");
    return r.convert_to<Int>();
}

inline Int integer_gate(const Cplx& z, const Real& max_residual, const std::string& what) {
    if (boost::multiprecision::abs(z.im) >= max_residual)
        throw integer_gate_error("integer gate failed for " + what + ": imaginary part " +
                                 z.im.str(10) + " exceeds " + max_residual.str(5));
    return round_to_integer_gate(z.re, max_residual, what);
}

}  // namespace thetastrat
