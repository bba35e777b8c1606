#pragma once

// The Teleman-Woodward engine: levels and admissibility, enumeration of the
// solution set F_rho of (xi,-)_{h+c} = 2 pi i rho mod M(1), and the index sum
// over regular Weyl orbits with deformed solution points and theta factors.
//
// The engine works with one generalized insertion format that covers the
// plain index, the z,s,t generating function, and the Euler-class-corrected
// Levi indices of the recursion:
//   op_sum     : sum_j mult_j tag_j e^{theta_j(xi)}   (character factors)
//   op_powers  : prod_j (1 - tag_j e^{gamma_j(xi)})^{e_j}
//   deform     : raw W_t-terms; each adds coeff*tag*e^{gamma(xi)} gamma to
//                the defining equation and coeff*tag*e^{gamma(xi)}
//                gamma^dagger gamma to the theta determinant.

#include "thetastrat/series.hpp"
#include "thetastrat/strata.hpp"

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace thetastrat {

struct LevelData {
    QuadForm h_classical;  // positive level as configured
    int orientation = -1;  // h_eq = orientation * h_classical
    int theta_sign = 1;    // sign applied to Delta^2 in theta
    QMat h_eq;
    QMat c_form;   // -1/2 Tr_g
    QMat h_prime;  // h_eq + c_form; integer, negative definite when admissible
    bool tw_admissible = false;
};

inline LevelData build_level(const RootDatum& d, const QuadForm& h_classical,
                             int orientation = -1) {
    LevelData lv;
    lv.h_classical = h_classical;
    lv.orientation = orientation;
    lv.h_eq = mat_scale(Rational(orientation), h_classical.matrix);
    lv.c_form = mat_scale(Rational(-1, 2), tr_adjoint_form(d).matrix);
    lv.h_prime = mat_add(lv.h_eq, lv.c_form);
    lv.theta_sign = (d.positive_roots.size() % 2 == 0) ? 1 : -1;

    bool ok = true;
    // positive on the semisimple part
    if (d.num_simple() > 0) {
        QMat s = from_columns(d.simple_coroots, d.rank);
        QMat restricted = mat_mul(transpose(s), mat_mul(h_classical.matrix, s));
        ok = ok && classify_form(restricted) == Definiteness::positive;
    }
    ok = ok && classify_form(lv.h_prime) == Definiteness::negative;
    for (const auto& q : lv.h_prime.a)
        if (denominator(q) != 1) ok = false;
    lv.tw_admissible = ok;
    return lv;
}

struct SolutionPoint {
    QVec v;  // xi = 2 pi i v
    bool regular = false;
    long orbit_size = 0;
};

namespace detail {

inline QVec mod_one(const QVec& v) {
    QVec r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = v[i] - Rational(rat_floor(v[i]));
    return r;
}

}  // namespace detail

// All |det h'| solutions v = (h')^{-1}(rho + m), m over coset representatives
// of M/(h' N); regularity is the exact test <v, alpha> not in Z for all roots.
inline std::vector<SolutionPoint> enumerate_F_rho(const LevelData& lv, const RootDatum& d) {
    ZMat hp(d.rank, d.rank);
    for (int i = 0; i < d.rank; ++i)
        for (int j = 0; j < d.rank; ++j) {
            if (denominator(lv.h_prime(i, j)) != 1)
                throw precondition_error("h + c must be an integer matrix");
            hp(i, j) = numerator(lv.h_prime(i, j));
        }
    auto hp_inv = inverse(lv.h_prime);
    if (!hp_inv) throw precondition_error("h + c is singular");
    QVec rho = d.half_sum_positive_roots();
    std::vector<SolutionPoint> sols;
    for (const auto& m : coset_representatives(hp)) {
        SolutionPoint sp;
        sp.v = mat_vec(*hp_inv, rho + m);
        sp.regular = true;
        for (const auto& a : d.positive_roots)
            if (denominator(dot(sp.v, a)) == 1) sp.regular = false;
        sols.push_back(std::move(sp));
    }
    return sols;
}

// Group the solutions into W-orbits modulo N; representatives keep the
// deterministic (lexicographically least canonical form) ordering so that
// series accumulation is bit-stable.
inline std::vector<SolutionPoint> weyl_orbit_representatives(const std::vector<SolutionPoint>& sols,
                                                             const RootDatum& d) {
    std::map<std::vector<std::string>, SolutionPoint> orbits;
    for (const auto& sp : sols) {
        std::set<QVec, thetastrat::detail::QVecLess> orbit;
        for (const auto& w : d.weyl) orbit.insert(detail::mod_one(mat_vec(w, sp.v)));
        std::vector<std::string> key;
        for (const auto& x : orbit)
            for (const auto& q : x) key.push_back(to_string(q));
        auto it = orbits.find(key);
        if (it == orbits.end()) {
            SolutionPoint rep = sp;
            rep.orbit_size = static_cast<long>(orbit.size());
            orbits.emplace(std::move(key), std::move(rep));
        }
    }
    std::vector<SolutionPoint> reps;
    for (auto& [k, sp] : orbits) reps.push_back(sp);
    return reps;
}

struct ChSumTerm {
    QVec weight;
    Int mult{1};
    Monomial tag;
};
struct ChPowerTerm {
    QVec weight;
    Monomial tag;
    long exponent = 1;
};
struct DeformTerm {
    QVec weight;
    Monomial tag;
    Rational coeff{1};
};
// a bare exponential multiplier tag * e^{weight(xi)} (determinant twists)
struct ExpFactor {
    QVec weight;
    Monomial tag;
};

struct IndexProblem {
    const RootDatum* datum = nullptr;
    LevelData level;
    int genus = 0;
    std::vector<ChSumTerm> op_sum;      // empty means the trivial character 1
    std::vector<ChPowerTerm> op_powers;
    std::vector<DeformTerm> deform;
    std::vector<ExpFactor> exp_factors;
    Truncation trunc;
    Monomial prefactor_tag;   // e.g. determinant shifts in the recursion
    Cplx prefactor = Cplx(1);
    int zdim = 0;             // dimension of the z-exponent vectors
};

struct IndexReport {
    TruncatedSeries series;
    long solutions = 0;
    long regular_orbits = 0;
    int genus = 0;
};

namespace detail {

// e^{scale * gamma(xi)} as a series: a root of unity at the base point
// xi_0 = 2 pi i v times the exponential of the eta-pairing.
inline TruncatedSeries exp_weight(const QVec& gamma, const QVec& v, const SeriesVector& eta,
                                  Truncation tr, const Rational& scale = Rational(1)) {
    TruncatedSeries pairing(tr);
    for (size_t i = 0; i < gamma.size(); ++i) {
        if (gamma[i] == 0 || eta[i].is_zero()) continue;
        pairing = pairing + eta[i].scaled(Cplx(from_rational(scale * gamma[i])));
    }
    Cplx base = unit_root(dot(v, gamma) * scale);
    return series_exp(pairing).scaled(base);
}

}  // namespace detail

// The index sum over regular orbits. Solution points are deformed by the
// equation h' eta + sum_terms coeff tag e^{gamma(2 pi i v + eta)} gamma = 0,
// solved per orbit by the frozen-Jacobian Newton iteration.
inline IndexReport tw_engine(const IndexProblem& p) {
    const RootDatum& d = *p.datum;
    if (!p.level.tw_admissible)
        throw precondition_error("level is not TW-admissible (need h positive and h+c negative definite integral)");
    if (p.genus < 0) throw precondition_error("genus must be >= 0");
    Rational det_hp = det(p.level.h_prime);
    auto sols = enumerate_F_rho(p.level, d);
    auto reps = weyl_orbit_representatives(sols, d);

    auto hp_inv = inverse(p.level.h_prime);
    Truncation tr = p.trunc;
    IndexReport rep;
    rep.genus = p.genus;
    rep.solutions = static_cast<long>(sols.size());
    rep.series = TruncatedSeries(tr);

    std::vector<ChSumTerm> op_sum = p.op_sum;
    if (op_sum.empty()) op_sum.push_back(ChSumTerm{QVec(d.rank, Rational(0)), Int(1), Monomial{}});

    for (const auto& sp : reps) {
        if (!sp.regular) continue;
        if (sp.orbit_size != static_cast<long>(d.weyl.size()))
            throw std::logic_error("regular point with non-free Weyl orbit");
        ++rep.regular_orbits;
        const QVec& v = sp.v;

        // solve for the deformation eta of this solution point
        SeriesVector eta(d.rank, TruncatedSeries(tr));
        if (!p.deform.empty()) {
            auto f = [&](const SeriesVector& e) {
                SeriesVector out(d.rank, TruncatedSeries(tr));
                for (int i = 0; i < d.rank; ++i)
                    for (int j = 0; j < d.rank; ++j)
                        if (p.level.h_prime(i, j) != 0)
                            out[i] = out[i] + e[j].scaled(Cplx(from_rational(p.level.h_prime(i, j))));
                for (const auto& term : p.deform) {
                    TruncatedSeries factor =
                        detail::exp_weight(term.weight, v, e, tr)
                            .shifted(term.tag)
                            .scaled(Cplx(from_rational(term.coeff)));
                    for (int i = 0; i < d.rank; ++i)
                        if (term.weight[i] != 0)
                            out[i] = out[i] + factor.scaled(Cplx(from_rational(term.weight[i])));
                }
                return out;
            };
            eta = solve_fixed_point(f, p.level.h_prime, d.rank, tr);
        }

        // theta determinant factor
        SeriesMatrix inner = SeriesMatrix::identity(d.rank, tr);
        for (const auto& term : p.deform) {
            TruncatedSeries factor = detail::exp_weight(term.weight, v, eta, tr)
                                         .shifted(term.tag)
                                         .scaled(Cplx(from_rational(term.coeff)));
            if (factor.is_zero()) continue;
            QVec gd = mat_vec(*hp_inv, term.weight);  // gamma^dagger w.r.t. h+c
            for (int i = 0; i < d.rank; ++i) {
                if (gd[i] == 0) continue;
                for (int j = 0; j < d.rank; ++j) {
                    if (term.weight[j] == 0) continue;
                    inner(i, j) = inner(i, j) + factor.scaled(Cplx(from_rational(gd[i] * term.weight[j])));
                }
            }
        }

        // Delta(xi)^2 with the calibrated sign
        TruncatedSeries delta_sq = TruncatedSeries::one(tr);
        for (const auto& a : d.positive_roots) {
            TruncatedSeries lo = detail::exp_weight(a, v, eta, tr, Rational(-1, 2));
            TruncatedSeries hi = detail::exp_weight(a, v, eta, tr, Rational(1, 2));
            TruncatedSeries diff = lo - hi;
            delta_sq = delta_sq * diff * diff;
        }
        TruncatedSeries theta =
            inner.det().inverse() * delta_sq.scaled(Cplx(from_rational(
                                        Rational(p.level.theta_sign) / abs(det_hp))));

        // character sum and lambda-class powers
        TruncatedSeries chsum(tr);
        for (const auto& term : op_sum) {
            TruncatedSeries e = detail::exp_weight(term.weight, v, eta, tr).shifted(term.tag);
            chsum = chsum + e.scaled(Cplx(from_rational(Rational(term.mult))));
        }
        TruncatedSeries powers = TruncatedSeries::one(tr);
        for (const auto& term : p.op_powers) {
            TruncatedSeries base =
                TruncatedSeries::one(tr) -
                detail::exp_weight(term.weight, v, eta, tr).shifted(term.tag);
            powers = powers * base.pow(term.exponent);
        }
        for (const auto& term : p.exp_factors)
            powers = powers * detail::exp_weight(term.weight, v, eta, tr).shifted(term.tag);

        TruncatedSeries contrib = chsum * powers * theta.pow(1 - p.genus);
        rep.series = rep.series + contrib;
    }
    rep.series = rep.series.shifted(p.prefactor_tag).scaled(p.prefactor);
    return rep;
}

// ---------------------------------------------------------------------------
// Plain Teleman-Woodward index over Bun_G(C): no z-variables.
// ---------------------------------------------------------------------------

// W_t entries: a virtual weight with a deformation monomial and coefficient.
struct FormalClassTerm {
    WeightedRep rep;
    Monomial tag;
    Rational coeff{1};
};

inline IndexReport tw_index(const RootDatum& d, const LevelData& lv, int genus,
                            const WeightedRep& u_prime, const std::vector<FormalClassTerm>& w_t,
                            Truncation tr) {
    IndexProblem p;
    p.datum = &d;
    p.level = lv;
    p.genus = genus;
    p.trunc = tr;
    for (const auto& e : u_prime.entries) p.op_sum.push_back({e.weight, e.mult, Monomial{}});
    for (const auto& fc : w_t)
        for (const auto& e : fc.rep.entries)
            p.deform.push_back({e.weight, fc.tag, fc.coeff * Rational(e.mult)});
    return tw_engine(p);
}

// Undeformed integer index (the t = s = 0 coefficient through the gate).
inline Int tw_index_integer(const RootDatum& d, const LevelData& lv, int genus,
                            const WeightedRep& u_prime) {
    Truncation tr{.t_order = 0, .s_order = 0};
    IndexReport rep = tw_index(d, lv, genus, u_prime, {}, tr);
    Real residual = Real("1e-9");
    return integer_gate(rep.series.constant_term(), residual, "tw index");
}

// ---------------------------------------------------------------------------
// z-graded generating function over M(X/G): the full index formula.
// ---------------------------------------------------------------------------

// Integer basis of N^W (the z-direction lattice) and coordinates of
// characters restricted to it.
struct ZLattice {
    std::vector<QVec> basis;

    int dim() const { return static_cast<int>(basis.size()); }

    std::vector<Rational> coords(const QVec& functional) const {
        std::vector<Rational> c(basis.size());
        for (size_t i = 0; i < basis.size(); ++i) c[i] = dot(basis[i], functional);
        return c;
    }
};

inline ZLattice build_z_lattice(const RootDatum& d) {
    ZLattice z;
    if (d.num_simple() == 0) {
        for (int i = 0; i < d.rank; ++i) {
            QVec e(d.rank, Rational(0));
            e[i] = 1;
            z.basis.push_back(e);
        }
        return z;
    }
    ZMat rows(d.num_simple(), d.rank);
    for (int i = 0; i < d.num_simple(); ++i)
        for (int j = 0; j < d.rank; ++j) {
            if (denominator(d.simple_roots[i][j]) != 1)
                throw precondition_error("z-lattice needs integral simple roots");
            rows(i, j) = numerator(d.simple_roots[i][j]);
        }
    for (const auto& col : integer_kernel(rows)) {
        QVec v(d.rank);
        for (int j = 0; j < d.rank; ++j) v[j] = Rational(col[j]);
        z.basis.push_back(std::move(v));
    }
    return z;
}

// Z-basis of M^W, for the H_2(BG) integrality test on extracted degrees.
inline std::vector<QVec> invariant_character_basis(const RootDatum& d) {
    if (d.weyl_generators.empty()) {
        std::vector<QVec> b;
        for (int i = 0; i < d.rank; ++i) {
            QVec e(d.rank, Rational(0));
            e[i] = 1;
            b.push_back(e);
        }
        return b;
    }
    ZMat stacked(static_cast<int>(d.weyl_generators.size()) * d.rank, d.rank);
    int row = 0;
    for (const auto& g : d.weyl_generators) {
        QMat gm = d.weyl_on_M(g);
        for (int i = 0; i < d.rank; ++i, ++row)
            for (int j = 0; j < d.rank; ++j) {
                Rational q = gm(i, j) - (i == j ? 1 : 0);
                if (denominator(q) != 1)
                    throw precondition_error("Weyl action on M must be integral");
                stacked(row, j) = numerator(q);
            }
    }
    std::vector<QVec> b;
    for (const auto& col : integer_kernel(stacked)) {
        QVec v(d.rank);
        for (int j = 0; j < d.rank; ++j) v[j] = Rational(col[j]);
        b.push_back(std::move(v));
    }
    return b;
}

struct FullIndexConfig {
    WeightedRep u;        // sqrt(K)-insertions with the s parameter
    WeightedRep u_prime;  // O_p-insertions
    WeightedRep x;        // the linear target
};

// Build the z,s,t problem of the index formula: the quasimap deformation is
// the Adams expansion of ln(1 - t z^{-beta} e^{beta}) beta for beta a weight
// of X^*, the theta determinant picks up the matching rank-one terms, and the
// (g-1)-st lambda power of the O_p-part of E_K(X^*) enters as an explicit
// character factor.
inline IndexProblem build_full_index_problem(const RootDatum& d, const LevelData& lv, int genus,
                                             const FullIndexConfig& cfg, Truncation tr) {
    IndexProblem p;
    p.datum = &d;
    p.level = lv;
    p.genus = genus;
    p.trunc = tr;
    ZLattice z = build_z_lattice(d);
    p.zdim = z.dim();
    auto ztag = [&](const QVec& weight, int tpow, int spow, const Rational& zscale) {
        Monomial m;
        m.t = tpow;
        m.s = spow;
        m.z = z.coords(weight);
        for (auto& q : m.z) q *= zscale;
        return m;
    };
    if (cfg.u_prime.entries.empty())
        p.op_sum.push_back({QVec(d.rank, Rational(0)), Int(1), Monomial{}});
    for (const auto& e : cfg.u_prime.entries)
        p.op_sum.push_back({e.weight, e.mult, ztag(e.weight, 0, 0, Rational(-1))});
    for (const auto& e : cfg.u.entries)
        p.deform.push_back({e.weight, ztag(e.weight, 0, 1, Rational(-1)), Rational(e.mult)});
    for (const auto& e : cfg.x.entries) {
        QVec beta = -e.weight;  // weights of X^*
        for (int pw = 1; pw <= tr.t_order; ++pw) {
            QVec pb = Rational(pw) * beta;
            p.deform.push_back({pb, ztag(beta, pw, 0, Rational(-pw)),
                                Rational(-e.mult, static_cast<long>(pw) * pw)});
        }
        if (genus != 1)
            p.op_powers.push_back(
                {beta, ztag(beta, 1, 0, Rational(-1)), (genus - 1) * e.mult.convert_to<long>()});
    }
    return p;
}

inline IndexReport full_index_formula(const RootDatum& d, const LevelData& lv, int genus,
                                      const FullIndexConfig& cfg, Truncation tr) {
    return tw_engine(build_full_index_problem(d, lv, genus, cfg, tr));
}

// Extract I_d: the t,s-series sitting at the z-exponent h_eq(d, -)|_{N^W}.
inline std::map<std::pair<int, int>, Cplx> extract_degree_series(const IndexReport& rep,
                                                                 const RootDatum& d,
                                                                 const LevelData& lv,
                                                                 const QVec& degree) {
    ZLattice z = build_z_lattice(d);
    std::vector<Rational> want = z.coords(mat_vec(lv.h_eq, degree));
    std::map<std::pair<int, int>, Cplx> out;
    for (const auto& [m, c] : rep.series.terms) {
        if (m.q != 0) continue;
        std::vector<Rational> mz = m.z;
        mz.resize(want.size(), Rational(0));
        if (mz != want) continue;
        auto [it, fresh] = out.try_emplace({m.t, m.s}, c);
        if (!fresh) it->second += c;
    }
    return out;
}

// A posteriori z-support invariant: every non-negligible monomial must sit at
// h_eq(d,-) for some d in H_2(BG) = (M^W)^dual. Returns the offending
// monomials (empty = pass).
inline std::vector<Monomial> z_support_violations(const IndexReport& rep, const RootDatum& d,
                                                  const LevelData& lv, const Real& floor) {
    ZLattice z = build_z_lattice(d);
    auto mw = invariant_character_basis(d);
    std::vector<Monomial> bad;
    if (z.dim() == 0) return bad;
    // Gram of h_eq on the z-lattice: e = G x for the N^W-coordinates x of d
    QMat gram(z.dim(), z.dim());
    for (int i = 0; i < z.dim(); ++i)
        for (int j = 0; j < z.dim(); ++j) gram(i, j) = dot(z.basis[i], mat_vec(lv.h_eq, z.basis[j]));
    auto gram_inv = inverse(gram);
    if (!gram_inv) throw precondition_error("level degenerate on the central directions");
    for (const auto& [m, c] : rep.series.terms) {
        if (c.abs() < floor) continue;
        QVec e(z.dim(), Rational(0));
        for (size_t i = 0; i < m.z.size() && i < static_cast<size_t>(z.dim()); ++i) e[i] = m.z[i];
        QVec x = mat_vec(*gram_inv, e);
        QVec deg(d.rank, Rational(0));
        for (int j = 0; j < z.dim(); ++j) deg = deg + x[j] * z.basis[j];
        bool ok = true;
        for (const auto& mwb : mw)
            if (denominator(dot(deg, mwb)) != 1) ok = false;
        if (!ok) bad.push_back(m);
    }
    return bad;
}

// a ~ rank(a) [sqrt K] + (deg(a) + rank(a)(1-g)) [O_p] in K-theory modulo
// algebraic equivalence.
struct AbClassDecomposition {
    Rational sqrtk_coefficient;
    Rational op_coefficient;
};

inline AbClassDecomposition ab_class_reduce(const Rational& rank_a, const Rational& deg_a,
                                            int genus) {
    return {rank_a, deg_a + rank_a * Rational(1 - genus)};
}

// Calibration: the engine's theta sign must reproduce the abelian h^g law and
// the classical SL2 Verlinde dimensions. Returns the validated sign (+1 means
// the built-in (-1)^{|Phi+|} convention is confirmed).
inline int calibrate_theta_sign() {
    // GL1, h = 3, g in {0, 2}: expect 3^g
    RootDatum gl1 = root_datum_torus(1);
    QMat h3(1, 1);
    h3(0, 0) = 3;
    LevelData lv = build_level(gl1, QuadForm(h3));
    WeightedRep triv;
    triv.add(QVec{Rational(0)}, Int(1));
    for (int g : {0, 2}) {
        Int got = tw_index_integer(gl1, lv, g, triv);
        Int want = g == 0 ? Int(1) : Int(9);
        if (got != want)
            throw precondition_error("theta-sign calibration failed on the abelian oracle");
    }
    // A1 at level k = 1, g in {0, 1}: expect V_g(1) = 1, 2
    RootDatum a1 = root_datum_A1();
    QMat hk(1, 1);
    hk(0, 0) = 2;  // level-1 form: 2k on the coroot
    LevelData lva = build_level(a1, QuadForm(hk));
    WeightedRep triv1;
    triv1.add(QVec{Rational(0)}, Int(1));
    if (tw_index_integer(a1, lva, 0, triv1) != 1 || tw_index_integer(a1, lva, 1, triv1) != 2)
        throw precondition_error("theta-sign calibration failed on the Verlinde oracle");
    return 1;
}

}  // namespace thetastrat
