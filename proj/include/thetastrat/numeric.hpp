#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace thetastrat {

using Int = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

// Error taxonomy mirrored by the CLI exit codes.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct integer_gate_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline Int numerator(const Rational& q) { return boost::multiprecision::numerator(q); }
inline Int denominator(const Rational& q) { return boost::multiprecision::denominator(q); }

inline int sign(const Rational& q) { return q.sign(); }

inline Rational abs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b, r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

inline Int rat_floor(const Rational& q) { return floor_div(numerator(q), denominator(q)); }
inline Int rat_ceil(const Rational& q) { return -rat_floor(-q); }

// Parses "p/q" or "p"; exact, no float round-trip.
inline Rational parse_rational(const std::string& s) {
    try {
        Rational r(s);
        if (denominator(r) == 0) throw config_error("rational with zero denominator: " + s);
        return r;
    } catch (const std::exception&) {
        throw config_error("cannot parse rational: '" + s + "'");
    }
}

inline std::string to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

inline double to_double(const Rational& q) { return q.convert_to<double>(); }

inline Int int_sqrt_floor(const Int& n) {
    if (n < 0) throw std::invalid_argument("int_sqrt_floor of negative");
    return boost::multiprecision::sqrt(n);
}

// Certified rational enclosure of sqrt(q): lb^2 <= q <= ub^2, ub - lb <= tol.
// Used wherever a norm bound must be decided without floating point.
struct SqrtBounds {
    Rational lb, ub;
};

inline SqrtBounds rat_sqrt_bounds(const Rational& q, const Rational& tol) {
    if (q < 0) throw std::invalid_argument("rat_sqrt_bounds of negative");
    if (q == 0) return {Rational(0), Rational(0)};
    // scale so that floor-sqrt of the scaled integer is within tol
    Int scale = 1;
    Rational t = tol;
    while (t < 1) { scale *= 4; t *= 2; }
    // lb = floor(sqrt(q * scale^2)) / scale
    Rational qs = q * scale * scale;
    Int lo = int_sqrt_floor(rat_floor(qs));
    Rational lb(lo, scale), ub(lo + 1, scale);
    if (lb * lb > q) lb = 0;  // guard tiny q
    return {lb, ub};
}

inline int cmp(const Rational& a, const Rational& b) { return a < b ? -1 : (a == b ? 0 : 1); }

}  // namespace thetastrat
