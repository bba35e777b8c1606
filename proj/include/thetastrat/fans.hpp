#pragma once

// Polyhedral cones over Q with both generator and halfspace descriptions,
// the parabolic chamber cones, and the weight fan Sigma_X.

#include "thetastrat/quadform.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace thetastrat {

namespace detail {

// Extreme rays of the pointed cone { y : a_j . y >= 0 } in Q^s, by scanning
// (s-1)-subsets of constraints. Assumes pointedness.
inline std::vector<QVec> pointed_cone_rays(const std::vector<QVec>& rows, int s) {
    std::vector<QVec> rays;
    if (s == 0) return rays;
    const int m = static_cast<int>(rows.size());
    if (s == 1) {
        for (int sgn : {1, -1}) {
            QVec z(1, Rational(sgn));
            bool ok = true;
            for (const auto& a : rows)
                if (dot(a, z) < 0) { ok = false; break; }
            if (ok && m > 0) rays.push_back(z);
        }
        return rays;
    }
    std::vector<int> idx(s - 1);
    std::vector<QVec> found;
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == s - 1) {
            QMat sub(s - 1, s);
            for (int i = 0; i < s - 1; ++i)
                for (int j = 0; j < s; ++j) sub(i, j) = rows[idx[i]][j];
            auto ker = kernel_basis(sub);
            if (ker.size() != 1) return;
            for (int sgn : {1, -1}) {
                QVec z = Rational(sgn) * ker[0];
                bool ok = true;
                for (const auto& a : rows)
                    if (dot(a, z) < 0) { ok = false; break; }
                if (!ok) continue;
                QVec p = primitive(z);
                bool dup = false;
                for (const auto& r : found)
                    if (r == p) { dup = true; break; }
                if (!dup) found.push_back(p);
            }
            return;
        }
        for (int i = start; i <= m - (s - 1 - depth); ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    if (m >= s - 1) rec(0, 0);
    return found;
}

}  // namespace detail

struct Cone {
    int dim = 0;                        // ambient dimension
    std::vector<QVec> rays;             // primitive extreme rays (after lineality quotient)
    std::vector<QVec> lineality;        // basis of the lineality space
    std::vector<QVec> span;             // basis of span(cone)
    std::vector<QVec> facets;           // functionals, irredundant on span: cone = span cap {f >= 0}
    std::vector<QVec> span_equations;   // functionals cutting out span
    std::string provenance;

    int cone_dim() const { return static_cast<int>(span.size()); }

    bool contains(const QVec& v) const {
        for (const auto& e : span_equations)
            if (dot(e, v) != 0) return false;
        for (const auto& f : facets)
            if (dot(f, v) < 0) return false;
        return true;
    }

    bool in_relative_interior(const QVec& v) const {
        for (const auto& e : span_equations)
            if (dot(e, v) != 0) return false;
        for (const auto& f : facets)
            if (dot(f, v) <= 0) return false;
        return true;
    }

    bool same_cone(const Cone& o) const {
        auto gens_in = [](const Cone& a, const Cone& b) {
            for (const auto& r : a.rays)
                if (!b.contains(r)) return false;
            for (const auto& l : a.lineality) {
                if (!b.contains(l)) return false;
                if (!b.contains(-l)) return false;
            }
            return true;
        };
        return cone_dim() == o.cone_dim() && gens_in(*this, o) && gens_in(o, *this);
    }

    // generators that positively span the cone (lineality given both signs)
    std::vector<QVec> positive_generators() const {
        std::vector<QVec> g = rays;
        for (const auto& l : lineality) {
            g.push_back(l);
            g.push_back(-l);
        }
        return g;
    }
};

namespace detail {

// Finish a cone whose rays/lineality are known: span, facet description via
// the dual cone, span equations.
inline void finish_cone(Cone& c) {
    const int n = c.dim;
    std::vector<QVec> gens = c.lineality;
    for (const auto& r : c.rays) gens.push_back(r);
    c.span = column_space_basis(gens, n);
    // span equations: kernel of span^T
    {
        QMat st(static_cast<int>(c.span.size()), n);
        for (size_t i = 0; i < c.span.size(); ++i)
            for (int j = 0; j < n; ++j) st(static_cast<int>(i), j) = c.span[i][j];
        c.span_equations = kernel_basis(st);
    }
    c.facets.clear();
    const int s = static_cast<int>(c.span.size());
    if (s == 0) return;
    // dual cone in span coordinates: { y : y . r_coord >= 0 for rays,
    // y . l_coord = 0 for lineality }; its extreme rays are the facets.
    QMat sm = from_columns(c.span, n);
    auto coords = [&](const QVec& v) {
        auto x = solve(sm, v);
        if (!x) throw std::logic_error("generator outside own span");
        return *x;
    };
    std::vector<QVec> lin_coords, ray_coords;
    for (const auto& l : c.lineality) lin_coords.push_back(coords(l));
    for (const auto& r : c.rays) ray_coords.push_back(coords(r));
    // restrict duals to the orthogonal complement of the lineality
    std::vector<QVec> dual_space;
    if (lin_coords.empty()) {
        for (int i = 0; i < s; ++i) {
            QVec e(s, Rational(0));
            e[i] = 1;
            dual_space.push_back(e);
        }
    } else {
        QMat lm(static_cast<int>(lin_coords.size()), s);
        for (size_t i = 0; i < lin_coords.size(); ++i)
            for (int j = 0; j < s; ++j) lm(static_cast<int>(i), j) = lin_coords[i][j];
        dual_space = kernel_basis(lm);
    }
    const int q = static_cast<int>(dual_space.size());
    if (q == 0) return;  // cone is a subspace; no facets
    // dual cone D = { z in Q^q : sum_k z_k dual_space[k] . r >= 0 }
    std::vector<QVec> rows;
    for (const auto& r : ray_coords) {
        QVec row(q);
        for (int k = 0; k < q; ++k) row[k] = dot(dual_space[k], r);
        rows.push_back(std::move(row));
    }
    auto dual_rays = pointed_cone_rays(rows, q);
    // lift back to ambient functionals (Euclidean extension off the span)
    QMat smt = transpose(sm);
    QMat gram = mat_mul(smt, sm);
    auto gi = inverse(gram);
    if (!gi) throw std::logic_error("span basis with singular Gram");
    QMat lift = mat_mul(sm, *gi);  // ambient = lift * (span-coord functional)
    for (const auto& z : dual_rays) {
        QVec y(s, Rational(0));
        for (int k = 0; k < q; ++k) y = y + z[k] * dual_space[k];
        c.facets.push_back(primitive(mat_vec(lift, y)));
    }
}

}  // namespace detail

// Cone from generators: rays + lineality basis.
inline Cone cone_from_generators(int dim, std::vector<QVec> rays, std::vector<QVec> lineality) {
    Cone c;
    c.dim = dim;
    for (auto& l : lineality)
        if (!is_zero(l)) c.lineality.push_back(l);
    c.lineality = column_space_basis(c.lineality, dim);
    for (auto& r : rays) {
        QVec p = primitive(r);
        if (is_zero(p)) continue;
        // drop rays inside the lineality
        if (in_span(c.lineality, p, dim)) continue;
        bool dup = false;
        for (const auto& e : c.rays)
            if (e == p) { dup = true; break; }
        if (!dup) c.rays.push_back(p);
    }
    detail::finish_cone(c);
    return c;
}

// Cone { v in span(span_basis) : f . v >= 0 for f in constraints }.
inline Cone cone_from_halfspaces(int dim, const std::vector<QVec>& span_basis,
                                 const std::vector<QVec>& constraints) {
    auto span = column_space_basis(span_basis, dim);
    const int s = static_cast<int>(span.size());
    QMat sm = from_columns(span, dim);
    // constraint rows in span coordinates
    std::vector<QVec> rows;
    for (const auto& f : constraints) {
        QVec row(s);
        bool zero = true;
        for (int k = 0; k < s; ++k) {
            row[k] = dot(f, span[k]);
            if (row[k] != 0) zero = false;
        }
        if (!zero) rows.push_back(std::move(row));
        // identically-zero rows are trivially satisfied
    }
    // lineality (in span coords) = common kernel of the rows
    std::vector<QVec> lin_coords;
    if (rows.empty()) {
        for (int i = 0; i < s; ++i) {
            QVec e(s, Rational(0));
            e[i] = 1;
            lin_coords.push_back(e);
        }
    } else {
        QMat rm(static_cast<int>(rows.size()), s);
        for (size_t i = 0; i < rows.size(); ++i)
            for (int j = 0; j < s; ++j) rm(static_cast<int>(i), j) = rows[i][j];
        lin_coords = kernel_basis(rm);
    }
    // complement coordinates for the pointed quotient
    std::vector<QVec> full = lin_coords;
    std::vector<QVec> comp;
    for (int i = 0; i < s; ++i) {
        QVec e(s, Rational(0));
        e[i] = 1;
        std::vector<QVec> trial = full;
        trial.push_back(e);
        if (static_cast<int>(trial.size()) <= s && rank(from_columns(trial, s)) == static_cast<int>(trial.size())) {
            full.push_back(e);
            comp.push_back(e);
        }
    }
    const int q = static_cast<int>(comp.size());
    std::vector<QVec> qrows;
    for (const auto& r : rows) {
        QVec row(q);
        for (int k = 0; k < q; ++k) row[k] = dot(r, comp[k]);
        qrows.push_back(std::move(row));
    }
    auto qrays = detail::pointed_cone_rays(qrows, q);
    Cone c;
    c.dim = dim;
    for (const auto& l : lin_coords) c.lineality.push_back(mat_vec(sm, l));
    c.lineality = column_space_basis(c.lineality, dim);
    for (const auto& z : qrays) {
        QVec y(s, Rational(0));
        for (int k = 0; k < q; ++k) y = y + z[k] * comp[k];
        QVec amb = primitive(mat_vec(sm, y));
        // keep only rays genuinely satisfying the constraints (pointed_cone_rays
        // guarantees it in quotient coords; re-check in ambient for safety)
        bool ok = true;
        for (const auto& f : constraints)
            if (dot(f, amb) < 0) { ok = false; break; }
        if (ok) c.rays.push_back(amb);
    }
    detail::finish_cone(c);
    return c;
}

// sigma_bar_P = central space + sum R_{>=0} omega_j^v (j in I_P); the tau_bar
// variant uses simple coroots as ray generators instead.
inline Cone chamber_cone(const RootDatum& d, const ParabolicType& p, bool tau_variant = false) {
    std::vector<QVec> rays;
    for (int j : p.index_set)
        rays.push_back(tau_variant ? d.simple_coroots[j] : d.fund_coweights[j]);
    Cone c = cone_from_generators(d.rank, rays, d.central_basis);
    c.provenance = std::string(tau_variant ? "tau" : "sigma") + "_P{";
    for (int j : p.index_set) c.provenance += std::to_string(j) + ",";
    c.provenance += "}";
    return c;
}

struct Fan {
    int dim = 0;
    std::vector<Cone> cones;

    // index of the unique cone whose relative interior contains v
    std::optional<int> minimal_cone_index(const QVec& v) const {
        std::optional<int> hit;
        for (size_t i = 0; i < cones.size(); ++i)
            if (cones[i].in_relative_interior(v)) {
                if (hit) throw std::logic_error("fan: relative interiors overlap");
                hit = static_cast<int>(i);
            }
        return hit;
    }

    const Cone& minimal_cone_containing(const QVec& v) const {
        auto i = minimal_cone_index(v);
        if (!i) throw precondition_error("point outside the fan support");
        return cones[*i];
    }
};

// Sigma_X: cones { w : beta(w) >= 0, beta in S+ } cap { beta(w) <= 0,
// beta in S- } cap sigma_bar_P over all covers S+ u S- of the X-weights and
// all parabolic types. Faces arise from weights placed in both sets; empty
// sign patterns are dropped; duplicate cones are merged.
inline Fan build_sigma_X(const RootDatum& d, const WeightedRep& x) {
    Fan fan;
    fan.dim = d.rank;
    std::vector<QVec> weights;
    for (const auto& e : x.entries)
        if (!is_zero(e.weight)) weights.push_back(e.weight);
    const int w = static_cast<int>(weights.size());
    if (w > 10) throw precondition_error("too many X-weights for fan enumeration");
    long patterns = 1;
    for (int i = 0; i < w; ++i) patterns *= 3;
    auto parabolics = all_parabolic_types(d);
    for (const auto& p : parabolics) {
        Cone chamber = chamber_cone(d, p);
        for (long code = 0; code < patterns; ++code) {
            long cc = code;
            std::vector<QVec> constraints = chamber.facets;
            std::string prov = "P{";
            for (int j : p.index_set) prov += std::to_string(j) + ",";
            prov += "} S+{";
            std::string sminus = "} S-{";
            for (int i = 0; i < w; ++i) {
                int s = static_cast<int>(cc % 3);  // 0: S+, 1: S-, 2: both
                cc /= 3;
                if (s == 0 || s == 2) {
                    constraints.push_back(weights[i]);
                    prov += std::to_string(i) + ",";
                }
                if (s == 1 || s == 2) {
                    constraints.push_back(-weights[i]);
                    sminus += std::to_string(i) + ",";
                }
            }
            Cone c = cone_from_halfspaces(d.rank, chamber.span, constraints);
            bool dup = false;
            for (const auto& e : fan.cones)
                if (e.same_cone(c)) { dup = true; break; }
            if (!dup) {
                c.provenance = prov + sminus + "}";
                fan.cones.push_back(std::move(c));
            }
        }
    }
    return fan;
}

// b-orthogonal projection of v onto span(cone).
inline QVec project_onto_span(const Cone& c, const QVec& v, const QuadForm& b) {
    if (c.span.empty()) return QVec(c.dim, Rational(0));
    return mat_vec(b_orthogonal_projection(c.span, b), v);
}

}  // namespace thetastrat
