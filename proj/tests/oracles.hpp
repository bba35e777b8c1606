#pragma once

// Independent desk-scale oracles used by the unit and acceptance suites.
// These deliberately avoid the library's own code paths wherever the thing
// they check is nontrivial: grids for the optimizer, closed-form sums for
// the index engine, exhaustive lattice scans for the stratum enumeration.

#include "thetastrat/hnopt.hpp"

#include <cmath>
#include <optional>
#include <vector>

namespace oracles {

using namespace thetastrat;

// Evaluate f = l(w) - |w|^2_b/2 on a cube grid of side (2*steps+1) around
// `center` with the given step; infeasible points are skipped. Returns the
// best value found, if any feasible point exists.
inline std::optional<Rational> cube_grid_best(const PiecewiseLinearConcave& l, const QuadForm& b,
                                              const Cone& cone, const QVec& center,
                                              int steps, const Rational& step,
                                              const Rational& exact_value, bool* dominated) {
    int n = cone.dim;
    std::optional<Rational> best;
    std::vector<int> k(n, -steps);
    while (true) {
        QVec w(n);
        for (int i = 0; i < n; ++i) w[i] = center[i] + Rational(k[i]) * step;
        if (cone.contains(w)) {
            Rational v = l.value(w) - b.norm_sq(w) / 2;
            if (v > exact_value && dominated) *dominated = false;
            if (!best || v > *best) best = v;
        }
        int pos = n - 1;
        while (pos >= 0) {
            ++k[pos];
            if (k[pos] <= steps) break;
            k[pos] = -steps;
            --pos;
        }
        if (pos < 0) break;
    }
    return best;
}

// Points (j/segments) * target for j = 0..segments-1; all feasible by
// convexity of the cone. Deliberately excludes the endpoint itself.
inline std::optional<Rational> segment_grid_best(const PiecewiseLinearConcave& l,
                                                 const QuadForm& b, const Cone& cone,
                                                 const QVec& target, int segments,
                                                 const Rational& exact_value, bool* dominated) {
    std::optional<Rational> best;
    for (int j = 0; j < segments; ++j) {
        QVec w = Rational(j, segments) * target;
        if (!cone.contains(w)) continue;
        Rational v = l.value(w) - b.norm_sq(w) / 2;
        if (v > exact_value && dominated) *dominated = false;
        if (!best || v > *best) best = v;
    }
    return best;
}

struct GridVerdict {
    bool dominated = true;   // exact >= every grid value
    bool close = false;      // exact - best_grid <= tolerance
    Rational best_grid;
    Rational gap;
};

// The optimizer acceptance oracle: the exact value must dominate a cube grid
// around the claimed maximizer, a coarse cube around the origin, and a
// radial grid along [0, w*); and the best grid value must approximate it.
inline GridVerdict grid_check(const PiecewiseLinearConcave& l, const QuadForm& b, const Cone& cone,
                              const OptResult& r, const Rational& tolerance) {
    GridVerdict verdict;
    Rational fine(1, 256);  // step 2^-8
    std::optional<Rational> best;
    auto merge = [&](std::optional<Rational> v) {
        if (v && (!best || *v > *best)) best = v;
    };
    merge(cube_grid_best(l, b, cone, r.maximizer, 8, fine, r.value, &verdict.dominated));
    QVec origin(cone.dim, Rational(0));
    merge(cube_grid_best(l, b, cone, origin, 8, Rational(1, 4), r.value, &verdict.dominated));
    merge(segment_grid_best(l, b, cone, r.maximizer, 256, r.value, &verdict.dominated));
    if (!best) return verdict;  // only the origin was feasible; handled by caller
    verdict.best_grid = *best;
    verdict.gap = r.value - *best;
    verdict.close = verdict.gap <= tolerance;
    return verdict;
}

// Classical SL2 Verlinde dimension V_g(k), computed with doubles and std::sin,
// independent of the index engine.
inline double verlinde_sum_sl2(int level, int genus) {
    double k2 = level + 2;
    double total = 0.0;
    for (int j = 1; j <= level + 1; ++j) {
        double s = std::sin(M_PI * j / k2);
        total += std::pow(s, 2 - 2 * genus);
    }
    return std::pow(k2 / 2.0, genus - 1) * total;
}

// Abelian theta dimension: level-h line bundle on a genus-g Jacobian.
inline double abelian_theta_dim(long h, int genus) { return std::pow(static_cast<double>(h), genus); }

}  // namespace oracles
