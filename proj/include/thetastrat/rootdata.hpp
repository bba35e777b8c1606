#pragma once

// Split root data: lattices N (coweights) and M (weights) in coordinates, the
// perfect pairing <v, m> = dot(v, m), simple (co)roots, fundamental
// (co)weights, and the Weyl group materialized as integer matrices on N.

#include "thetastrat/lattice.hpp"

#include <map>
#include <set>
#include <string>
#include <vector>

namespace thetastrat {

struct RootDatum {
    int rank = 0;                      // dim of N
    std::vector<QVec> simple_coroots;  // in N
    std::vector<QVec> simple_roots;    // in M
    std::vector<QVec> fund_coweights;  // in N_Q, dual to simple roots on the semisimple part
    std::vector<QVec> fund_weights;    // in M_Q, dual to simple coroots
    std::vector<QVec> central_basis;   // basis of N^W_Q = { v : <v, alpha_i> = 0 }
    std::vector<QMat> weyl_generators; // simple reflections acting on N
    std::vector<QMat> weyl;            // full Weyl group (matrices on N)
    std::vector<QVec> positive_roots;  // in M

    int num_simple() const { return static_cast<int>(simple_roots.size()); }

    QMat cartan_matrix() const {
        int l = num_simple();
        QMat c(l, l);
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < l; ++j) c(i, j) = dot(simple_coroots[i], simple_roots[j]);
        return c;
    }

    // all roots, as a W-orbit closure of the simple ones
    std::vector<QVec> all_roots() const {
        std::vector<QVec> r = positive_roots;
        for (const auto& a : positive_roots) r.push_back(-a);
        return r;
    }

    QVec half_sum_positive_roots() const {
        QVec rho(rank, Rational(0));
        for (const auto& a : positive_roots) rho = rho + a;
        return Rational(1, 2) * rho;
    }

    // action of a Weyl matrix (defined on N) on M: w* m = (w^{-1})^T m, and
    // since reflections generate, transpose-inverse = transpose of inverse
    // matrix; for orthogonal-like integer matrices we compute it exactly.
    QMat weyl_on_M(const QMat& w_on_N) const {
        auto inv = inverse(w_on_N);
        if (!inv) throw std::logic_error("singular Weyl matrix");
        return transpose(*inv);
    }
};

namespace detail {

struct QVecLess {
    bool operator()(const QVec& a, const QVec& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i]) return a[i] < b[i];
        return false;
    }
};

struct QMatLess {
    bool operator()(const QMat& a, const QMat& b) const {
        if (a.rows != b.rows) return a.rows < b.rows;
        if (a.cols != b.cols) return a.cols < b.cols;
        for (size_t i = 0; i < a.a.size(); ++i)
            if (a.a[i] != b.a[i]) return a.a[i] < b.a[i];
        return false;
    }
};

}  // namespace detail

inline constexpr long kDefaultWeylCap = 100000;

// Build from explicit coroot/root coordinate matrices. Validates the Cartan
// pairing and enumerates the Weyl group by closure (size-capped).
inline RootDatum build_root_datum(int rank, std::vector<QVec> coroots, std::vector<QVec> roots,
                                  long weyl_cap = kDefaultWeylCap) {
    if (coroots.size() != roots.size())
        throw config_error("coroot/root count mismatch");
    RootDatum d;
    d.rank = rank;
    d.simple_coroots = std::move(coroots);
    d.simple_roots = std::move(roots);
    const int l = d.num_simple();

    for (const auto& v : d.simple_coroots)
        if (static_cast<int>(v.size()) != rank) throw config_error("coroot of wrong dimension");
    for (const auto& v : d.simple_roots)
        if (static_cast<int>(v.size()) != rank) throw config_error("root of wrong dimension");

    QMat cartan = d.cartan_matrix();
    for (int i = 0; i < l; ++i) {
        if (cartan(i, i) != 2) throw config_error("Cartan matrix diagonal must be 2");
        for (int j = 0; j < l; ++j) {
            if (i == j) continue;
            if (cartan(i, j) > 0) throw config_error("Cartan matrix off-diagonal must be <= 0");
            if ((cartan(i, j) == 0) != (cartan(j, i) == 0))
                throw config_error("Cartan matrix zero pattern must be symmetric");
        }
    }
    if (l > 0) {
        QMat c = from_columns(d.simple_coroots, rank);
        QMat r = from_columns(d.simple_roots, rank);
        if (rank < l || thetastrat::rank(c) != l || thetastrat::rank(r) != l)
            throw config_error("simple (co)roots must be linearly independent");
        // fundamental (co)weights: Omega^v = C (A^T)^{-1}, Omega = R A^{-1}
        auto at_inv = inverse(transpose(cartan));
        auto a_inv = inverse(cartan);
        if (!at_inv || !a_inv) throw config_error("singular Cartan matrix");
        QMat fcw = mat_mul(c, *at_inv);
        QMat fw = mat_mul(r, *a_inv);
        for (int j = 0; j < l; ++j) {
            d.fund_coweights.push_back(column(fcw, j));
            d.fund_weights.push_back(column(fw, j));
        }
    }
    // central space = kernel of pairing against all simple roots
    {
        QMat rt(l, rank);
        for (int i = 0; i < l; ++i)
            for (int j = 0; j < rank; ++j) rt(i, j) = d.simple_roots[i][j];
        d.central_basis = kernel_basis(rt);
    }
    // reflections s_i(v) = v - <v, alpha_i> alpha_i^v
    for (int i = 0; i < l; ++i) {
        QMat s = QMat::identity(rank);
        for (int r2 = 0; r2 < rank; ++r2)
            for (int c2 = 0; c2 < rank; ++c2)
                s(r2, c2) -= d.simple_coroots[i][r2] * d.simple_roots[i][c2];
        d.weyl_generators.push_back(s);
    }
    // closure
    {
        std::set<QMat, detail::QMatLess> seen;
        std::vector<QMat> frontier{QMat::identity(rank)};
        seen.insert(frontier[0]);
        while (!frontier.empty()) {
            std::vector<QMat> next;
            for (const auto& w : frontier)
                for (const auto& g : d.weyl_generators) {
                    QMat wg = mat_mul(g, w);
                    if (seen.insert(wg).second) next.push_back(std::move(wg));
                }
            if (static_cast<long>(seen.size()) > weyl_cap)
                throw precondition_error("Weyl group exceeds cap (" + std::to_string(weyl_cap) +
                                         "); Cartan data may not be of finite type");
            frontier = std::move(next);
        }
        d.weyl.assign(seen.begin(), seen.end());
    }
    // positive roots: orbit of simple roots under W (acting on M), filtered to
    // nonnegative combinations of the simple ones
    {
        std::set<QVec, detail::QVecLess> roots_set;
        for (const auto& w : d.weyl) {
            QMat wm = d.weyl_on_M(w);
            for (const auto& a : d.simple_roots) roots_set.insert(mat_vec(wm, a));
        }
        QMat rmat = from_columns(d.simple_roots, rank);
        for (const auto& a : roots_set) {
            auto x = solve(rmat, a);
            if (!x) continue;
            bool nonneg = std::all_of(x->begin(), x->end(), [](const Rational& q) { return q >= 0; });
            if (nonneg) d.positive_roots.push_back(a);
        }
    }
    return d;
}

// Type A_n: N = coroot lattice Z^n with alpha_i^v = e_i, M the dual lattice,
// so alpha_j = j-th column of the Cartan matrix in the dual basis.
inline RootDatum root_datum_A(int n, long weyl_cap = kDefaultWeylCap) {
    std::vector<QVec> coroots, roots;
    for (int i = 0; i < n; ++i) {
        QVec cv(n, Rational(0));
        cv[i] = 1;
        coroots.push_back(cv);
        QVec rv(n, Rational(0));
        rv[i] = 2;
        if (i > 0) rv[i - 1] = -1;
        if (i + 1 < n) rv[i + 1] = -1;
        roots.push_back(rv);
    }
    return build_root_datum(n, coroots, roots, weyl_cap);
}

inline RootDatum root_datum_torus(int r) { return build_root_datum(r, {}, {}); }

// A1 in the SL2 normalization of the worked examples: N = Z a^v, M = Z w,
// <a^v, w> = 1, a = 2w.
inline RootDatum root_datum_A1() { return root_datum_A(1); }

inline RootDatum root_datum_product(const RootDatum& x, const RootDatum& y,
                                    long weyl_cap = kDefaultWeylCap) {
    int n = x.rank + y.rank;
    auto pad = [&](const QVec& v, bool first) {
        QVec r(n, Rational(0));
        int off = first ? 0 : x.rank;
        for (size_t i = 0; i < v.size(); ++i) r[off + i] = v[i];
        return r;
    };
    std::vector<QVec> coroots, roots;
    for (size_t i = 0; i < x.simple_coroots.size(); ++i) {
        coroots.push_back(pad(x.simple_coroots[i], true));
        roots.push_back(pad(x.simple_roots[i], true));
    }
    for (size_t i = 0; i < y.simple_coroots.size(); ++i) {
        coroots.push_back(pad(y.simple_coroots[i], false));
        roots.push_back(pad(y.simple_roots[i], false));
    }
    return build_root_datum(n, coroots, roots, weyl_cap);
}

// Named presets used by the CLI config ("A1", "A2", ..., "GL1", "torus2", ...).
inline RootDatum root_datum_preset(const std::string& tag, long weyl_cap = kDefaultWeylCap) {
    if (tag == "GL1") return root_datum_torus(1);
    if (tag.rfind("torus", 0) == 0) {
        int r = std::stoi(tag.substr(5));
        if (r < 1 || r > 16) throw config_error("torus rank out of range: " + tag);
        return root_datum_torus(r);
    }
    if (tag.size() >= 2 && tag[0] == 'A') {
        int n = std::stoi(tag.substr(1));
        if (n < 1 || n > 6) throw config_error("type A rank out of range: " + tag);
        return root_datum_A(n, weyl_cap);
    }
    throw config_error("unknown root datum preset: " + tag);
}

inline std::vector<QVec> weyl_orbit(const RootDatum& d, const QVec& v) {
    std::set<QVec, detail::QVecLess> orbit;
    std::vector<QVec> frontier{v};
    orbit.insert(v);
    while (!frontier.empty()) {
        std::vector<QVec> next;
        for (const auto& x : frontier)
            for (const auto& g : d.weyl_generators) {
                QVec gx = mat_vec(g, x);
                if (orbit.insert(gx).second) next.push_back(std::move(gx));
            }
        frontier = std::move(next);
    }
    return {orbit.begin(), orbit.end()};
}

// I_P indexes the simple roots alpha_i with U_{-alpha_i} not contained in P;
// I_B = everything, I_G = {}. rho_P^v = sum of the corresponding fundamental
// coweights pairs to 1 with each alpha_j, j in I_P.
struct ParabolicType {
    std::vector<int> index_set;

    static ParabolicType borel(const RootDatum& d) {
        ParabolicType p;
        for (int i = 0; i < d.num_simple(); ++i) p.index_set.push_back(i);
        return p;
    }
    static ParabolicType full_group() { return ParabolicType{}; }

    QVec rho_coweight(const RootDatum& d) const {
        QVec r(d.rank, Rational(0));
        for (int j : index_set) r = r + d.fund_coweights[j];
        return r;
    }

    // simple indices of the Levi factor (complement of I_P)
    std::vector<int> levi_indices(const RootDatum& d) const {
        std::vector<bool> in(d.num_simple(), false);
        for (int j : index_set) in[j] = true;
        std::vector<int> out;
        for (int i = 0; i < d.num_simple(); ++i)
            if (!in[i]) out.push_back(i);
        return out;
    }
};

inline std::vector<ParabolicType> all_parabolic_types(const RootDatum& d) {
    int l = d.num_simple();
    std::vector<ParabolicType> out;
    for (long mask = 0; mask < (1L << l); ++mask) {
        ParabolicType p;
        for (int i = 0; i < l; ++i)
            if (mask & (1L << i)) p.index_set.push_back(i);
        out.push_back(std::move(p));
    }
    return out;
}

// Representatives of M / (B N) via Smith reduction; |det B| of them.
inline std::vector<QVec> coset_representatives(const ZMat& b) {
    auto reps = lattice_coset_representatives(b);
    std::vector<QVec> out;
    out.reserve(reps.size());
    for (const auto& r : reps) {
        QVec v(r.size());
        for (size_t i = 0; i < r.size(); ++i) v[i] = Rational(r[i]);
        out.push_back(std::move(v));
    }
    return out;
}

}  // namespace thetastrat
