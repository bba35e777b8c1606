#pragma once

// Bilinear-form algebra on N_Q: the norm b, trace forms (-,-)_V of weighted
// representations, the dagger identification M_Q -> N_Q, phi_V and its
// Moore-Penrose pseudoinverse, and the positivity constant c_{X/V}.

#include "thetastrat/polynomial.hpp"
#include "thetastrat/rootdata.hpp"

#include <vector>

namespace thetastrat {

struct QuadForm {
    QMat matrix;  // symmetric, in the N-basis

    explicit QuadForm(QMat m = {}) : matrix(std::move(m)) {
        for (int i = 0; i < matrix.rows; ++i)
            for (int j = 0; j < i; ++j)
                if (matrix(i, j) != matrix(j, i))
                    throw precondition_error("quadratic form matrix is not symmetric");
    }

    int dim() const { return matrix.rows; }

    Rational inner(const QVec& x, const QVec& y) const { return dot(x, mat_vec(matrix, y)); }
    Rational norm_sq(const QVec& x) const { return inner(x, x); }

    Definiteness definiteness() const { return classify_form(matrix); }
    bool is_positive_definite() const { return definiteness() == Definiteness::positive; }

    bool is_weyl_invariant(const RootDatum& d) const {
        for (const auto& g : d.weyl_generators) {
            QMat gt_b_g = mat_mul(transpose(g), mat_mul(matrix, g));
            if (!(gt_b_g == matrix)) return false;
        }
        return true;
    }

    static QuadForm identity(int n) { return QuadForm(QMat::identity(n)); }
};

// Finite multiset of characters with integer multiplicities; negative
// multiplicities encode shifted summands like g[1].
struct WeightedRep {
    struct Entry {
        QVec weight;  // in M_Q
        Int mult;
    };
    std::vector<Entry> entries;

    WeightedRep() = default;

    void add(const QVec& w, const Int& m) {
        for (auto& e : entries)
            if (e.weight == w) {
                e.mult += m;
                if (e.mult == 0)
                    entries.erase(entries.begin() + (&e - entries.data()));
                return;
            }
        if (m != 0) entries.push_back({w, m});
    }

    WeightedRep scaled(const Int& m) const {
        WeightedRep r;
        for (const auto& e : entries) r.add(e.weight, e.mult * m);
        return r;
    }

    // X + g[1]: the adjoint roots enter with multiplicity -1
    static WeightedRep tangent_class(const WeightedRep& x, const RootDatum& d) {
        WeightedRep t = x;
        for (const auto& a : d.all_roots()) t.add(a, Int(-1));
        return t;
    }

    bool is_weyl_stable(const RootDatum& d) const {
        for (const auto& g : d.weyl_generators) {
            QMat gm = d.weyl_on_M(g);
            for (const auto& e : entries) {
                QVec img = mat_vec(gm, e.weight);
                bool found = false;
                for (const auto& f : entries)
                    if (f.weight == img && f.mult == e.mult) { found = true; break; }
                if (!found) return false;
            }
        }
        return true;
    }
};

// (w1, w2)_F = sum_chi mult(chi) <w1, chi> <w2, chi>
inline QuadForm ch2_form(const WeightedRep& rep, int dim) {
    QMat f(dim, dim);
    for (const auto& e : rep.entries)
        for (int i = 0; i < dim; ++i) {
            if (e.weight[i] == 0) continue;
            for (int j = 0; j < dim; ++j)
                if (e.weight[j] != 0) f(i, j) += Rational(e.mult) * e.weight[i] * e.weight[j];
        }
    return QuadForm(std::move(f));
}

inline QuadForm tr_adjoint_form(const RootDatum& d) {
    WeightedRep ad;
    for (const auto& a : d.all_roots()) ad.add(a, Int(1));
    return ch2_form(ad, d.rank);
}

struct SelfMap {
    QMat matrix;  // acting on N_Q

    QVec apply(const QVec& v) const { return mat_vec(matrix, v); }

    bool is_b_self_adjoint(const QuadForm& b) const {
        return mat_mul(transpose(matrix), b.matrix) == mat_mul(b.matrix, matrix);
    }
};

// phi_F with (phi(w), v)_b = (w, v)_F, i.e. phi = b^{-1} F.
inline SelfMap phi_of(const QuadForm& f, const QuadForm& b) {
    auto binv = inverse(b.matrix);
    if (!binv) throw precondition_error("phi_of: norm b is not invertible");
    return SelfMap{mat_mul(*binv, f.matrix)};
}

// b-orthogonal projection onto the span of the given vectors.
inline QMat b_orthogonal_projection(const std::vector<QVec>& span, const QuadForm& b) {
    int n = b.dim();
    auto basis = column_space_basis(span, n);
    if (basis.empty()) return QMat::zero(n, n);
    QMat s = from_columns(basis, n);
    QMat stb = mat_mul(transpose(s), b.matrix);
    QMat gram = mat_mul(stb, s);
    auto gi = inverse(gram);
    if (!gi) throw precondition_error("projection onto span: Gram matrix singular (b degenerate on span?)");
    return mat_mul(s, mat_mul(*gi, stb));
}

// Moore-Penrose: zero on ker(phi), inverse of phi on im(phi). Uses the exact
// identity phi^+ = (phi + P_ker)^{-1} - P_ker with P_ker the b-orthogonal
// projection onto ker(phi).
inline SelfMap pseudoinverse(const SelfMap& phi, const QuadForm& b) {
    if (!phi.is_b_self_adjoint(b))
        throw precondition_error("pseudoinverse requires a b-self-adjoint map");
    auto ker = kernel_basis(phi.matrix);
    if (ker.empty()) {
        auto inv = inverse(phi.matrix);
        if (!inv) throw std::logic_error("trivial kernel but singular matrix");
        return SelfMap{*inv};
    }
    QMat pker = b_orthogonal_projection(ker, b);
    QMat shifted = mat_add(phi.matrix, pker);
    auto inv = inverse(shifted);
    if (!inv) throw std::logic_error("phi + P_ker must be invertible");
    return SelfMap{mat_sub(*inv, pker)};
}

// chi^dagger: the vector with (chi^dagger, w)_b = <w, chi> for all w.
inline QVec dagger(const QVec& chi, const QuadForm& b) {
    auto binv = inverse(b.matrix);
    if (!binv) throw precondition_error("dagger: norm b is not invertible");
    return mat_vec(*binv, chi);
}

// Operator norm |phi|_b = max |eigenvalue| for a b-self-adjoint phi, as a
// certified rational enclosure via Sturm bisection on the char poly.
inline Interval operator_norm_enclosure(const SelfMap& phi, const Rational& tol) {
    return max_abs_root(char_poly(phi.matrix), tol);
}

// functional norm |l|_b = |l^dagger|_b = sqrt(l^T b^{-1} l); exact square.
inline Rational functional_norm_sq(const QVec& l, const QuadForm& b) {
    return dot(l, dagger(l, b));
}

// ---------------------------------------------------------------------------
// Sign-pattern (face) enumeration for the hyperplane arrangement cut by a set
// of linear functionals. Feasibility of {h_k = 0 / h_k > 0 / h_k < 0} systems
// is decided exactly by kernel substitution + Fourier-Motzkin elimination.
// ---------------------------------------------------------------------------

namespace detail {

// Feasibility of { rows r: r . y > 0 } (homogeneous, strict) over Q^m.
inline bool strict_system_feasible(std::vector<QVec> rows, int nvars) {
    // drop zero rows early: 0 > 0 is infeasible
    for (const auto& r : rows)
        if (is_zero(r)) return false;
    for (int var = 0; var < nvars; ++var) {
        std::vector<QVec> pos, neg, rest;
        for (auto& r : rows) {
            if (r[var] > 0) pos.push_back(r);
            else if (r[var] < 0) neg.push_back(r);
            else rest.push_back(r);
        }
        std::set<QVec, QVecLess> next(rest.begin(), rest.end());
        for (const auto& p : pos)
            for (const auto& n : neg) {
                // eliminate var: combo = p * (-n[var]) + n * p[var]
                QVec combo = (-n[var]) * p + p[var] * n;
                combo[var] = 0;
                next.insert(primitive(combo));
            }
        // if pos or neg rows existed, they are satisfiable in var once the
        // projected system holds (pick var between the induced bounds)
        rows.assign(next.begin(), next.end());
        for (const auto& r : rows)
            if (is_zero(r)) return false;
    }
    return rows.empty();
}

}  // namespace detail

// signs[k] in {-1, 0, +1} prescribed for functionals[k]; is there a v with
// sign(<v, functionals[k]>) == signs[k] for all k?
inline bool sign_pattern_feasible(const std::vector<QVec>& functionals,
                                  const std::vector<int>& signs, int dim) {
    std::vector<QVec> eqs;
    for (size_t k = 0; k < functionals.size(); ++k)
        if (signs[k] == 0) eqs.push_back(functionals[k]);
    std::vector<QVec> subspace;
    if (eqs.empty()) {
        for (int i = 0; i < dim; ++i) {
            QVec e(dim, Rational(0));
            e[i] = 1;
            subspace.push_back(e);
        }
    } else {
        QMat em(static_cast<int>(eqs.size()), dim);
        for (size_t i = 0; i < eqs.size(); ++i)
            for (int j = 0; j < dim; ++j) em(static_cast<int>(i), j) = eqs[i][j];
        subspace = kernel_basis(em);
    }
    int m = static_cast<int>(subspace.size());
    std::vector<QVec> rows;
    for (size_t k = 0; k < functionals.size(); ++k) {
        if (signs[k] == 0) continue;
        QVec r(m);
        bool zero = true;
        for (int j = 0; j < m; ++j) {
            r[j] = Rational(signs[k]) * dot(functionals[k], subspace[j]);
            if (r[j] != 0) zero = false;
        }
        if (zero) return false;  // functional vanishes on the subspace; strict sign impossible
        rows.push_back(std::move(r));
    }
    if (rows.empty()) return true;
    if (m == 0) return false;
    return detail::strict_system_feasible(std::move(rows), m);
}

// All achievable values of T^{lambda<0} as lambda ranges over N_R \ {0}
// (faces of the arrangement included, since lambda in the statement ranges
// over the whole lattice). Returns the distinct weighted reps.
inline std::vector<WeightedRep> negative_part_values(const WeightedRep& t_class, int dim) {
    // distinct hyperplanes, each a primitive functional; remember per entry
    // the orientation relative to its hyperplane normal
    std::vector<QVec> hyps;
    std::vector<std::pair<int, int>> entry_hyp;  // (hyperplane index, +-1)
    for (const auto& e : t_class.entries) {
        QVec p = primitive(e.weight);
        if (is_zero(p)) { entry_hyp.push_back({-1, 0}); continue; }
        QVec mp = -p;
        int found = -1, orient = 0;
        for (size_t h = 0; h < hyps.size(); ++h) {
            if (hyps[h] == p) { found = static_cast<int>(h); orient = 1; break; }
            if (hyps[h] == mp) { found = static_cast<int>(h); orient = -1; break; }
        }
        if (found < 0) {
            hyps.push_back(p);
            found = static_cast<int>(hyps.size()) - 1;
            orient = 1;
        }
        entry_hyp.push_back({found, orient});
    }
    const int k = static_cast<int>(hyps.size());
    if (k > 12) throw precondition_error("too many weight hyperplanes for face enumeration");
    std::vector<WeightedRep> values;
    std::vector<int> signs(k, 0);
    long total = 1;
    for (int i = 0; i < k; ++i) total *= 3;
    for (long code = 0; code < total; ++code) {
        long c = code;
        for (int i = 0; i < k; ++i) {
            signs[i] = static_cast<int>(c % 3) - 1;
            c /= 3;
        }
        if (!sign_pattern_feasible(hyps, signs, dim)) continue;
        WeightedRep neg;
        for (size_t e = 0; e < t_class.entries.size(); ++e) {
            auto [h, orient] = entry_hyp[e];
            if (h < 0) continue;  // zero weight never pairs negatively
            if (signs[h] * orient < 0) neg.add(t_class.entries[e].weight, t_class.entries[e].mult);
        }
        bool seen = false;
        for (const auto& v : values) {
            if (v.entries.size() != neg.entries.size()) continue;
            bool same = true;
            for (const auto& e : neg.entries) {
                bool hit = false;
                for (const auto& f : v.entries)
                    if (f.weight == e.weight && f.mult == e.mult) { hit = true; break; }
                if (!hit) { same = false; break; }
            }
            if (same) { seen = true; break; }
        }
        if (!seen) values.push_back(std::move(neg));
    }
    return values;
}

// c_{X/V} = |phi_V^+|_b * max_lambda |phi_{T^{lambda<0}}|_b with
// T = X + g[1]; certified enclosure.
inline Interval c_XV(const WeightedRep& x, const RootDatum& d, const WeightedRep& v,
                     const QuadForm& b, const Rational& tol = Rational(1, 1000000000000LL)) {
    if (!b.is_positive_definite()) throw precondition_error("c_XV: b must be positive definite");
    SelfMap phi_v = phi_of(ch2_form(v, d.rank), b);
    SelfMap phi_v_plus = pseudoinverse(phi_v, b);
    Interval a = operator_norm_enclosure(phi_v_plus, tol);
    WeightedRep t = WeightedRep::tangent_class(x, d);
    Interval best{Rational(0), Rational(0)};
    for (const auto& part : negative_part_values(t, d.rank)) {
        if (part.entries.empty()) continue;
        SelfMap phi_t = phi_of(ch2_form(part, d.rank), b);
        Interval nrm = operator_norm_enclosure(phi_t, tol);
        if (nrm.lo > best.lo) best.lo = nrm.lo;
        if (nrm.hi > best.hi) best.hi = nrm.hi;
    }
    return Interval{a.lo * best.lo, a.hi * best.hi};
}

}  // namespace thetastrat
