#pragma once

// Enumeration and certification of chi-active indexing data (d, lambda):
// integrality over X*(P_lambda), the projection identity on the weight fan,
// the pseudoinverse degree bound, shifted characters of stratum centers, and
// the semistability constraints on degrees.

#include "thetastrat/hnopt.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

namespace thetastrat {

// Order of a Coxeter element of the parabolic Weyl subgroup generated by the
// given simple reflections.
inline long coxeter_element_order(const RootDatum& d, const std::vector<int>& simple_indices) {
    QMat c = QMat::identity(d.rank);
    for (int i : simple_indices) c = mat_mul(c, d.weyl_generators[i]);
    QMat p = c;
    for (long ord = 1; ord <= 10000; ++ord) {
        if (p == QMat::identity(d.rank)) return ord;
        p = mat_mul(p, c);
    }
    throw precondition_error("Coxeter element order exceeds cap");
}

// H = lcm over parabolic types of the Coxeter-element order; every chi-active
// degree lies in (1/H) N.
inline long coxeter_H(const RootDatum& d) {
    long h = 1;
    const int l = d.num_simple();
    for (long mask = 0; mask < (1L << l); ++mask) {
        std::vector<int> idx;
        for (int i = 0; i < l; ++i)
            if (mask & (1L << i)) idx.push_back(i);
        long ord = coxeter_element_order(d, idx);
        h = std::lcm(h, ord);
    }
    return h;
}

// Everything the stratum tests need, precomputed once per configuration.
struct StrataContext {
    RootDatum datum;
    WeightedRep v_rep;   // V, the almost faithful representation behind L
    WeightedRep x_rep;   // X, the linear target
    QuadForm b;
    QVec chi;            // in M_Q^W

    QuadForm v_form{QMat()};
    SelfMap phi_v;
    SelfMap phi_v_plus;
    QVec chi_dagger;
    Fan sigma_x;
    long H = 1;
    std::vector<QVec> ker_phi_basis;
    QMat proj_ker;       // b-orthogonal projection onto ker(phi_V)
    QMat proj_central;   // b-orthogonal projection onto N^W

    StrataContext(RootDatum rd, WeightedRep v, WeightedRep x, QuadForm bb, QVec chi_in)
        : datum(std::move(rd)), v_rep(std::move(v)), x_rep(std::move(x)), b(std::move(bb)),
          chi(std::move(chi_in)) {
        if (!b.is_positive_definite())
            throw precondition_error("strata context: b must be positive definite");
        if (!b.is_weyl_invariant(datum))
            throw precondition_error("strata context: b must be Weyl invariant");
        v_form = ch2_form(v_rep, datum.rank);
        phi_v = phi_of(v_form, b);
        phi_v_plus = pseudoinverse(phi_v, b);
        chi_dagger = dagger(chi, b);
        sigma_x = build_sigma_X(datum, x_rep);
        H = coxeter_H(datum);
        ker_phi_basis = kernel_basis(phi_v.matrix);
        proj_ker = ker_phi_basis.empty() ? QMat::zero(datum.rank, datum.rank)
                                         : b_orthogonal_projection(ker_phi_basis, b);
        proj_central = datum.central_basis.empty()
                           ? QMat::zero(datum.rank, datum.rank)
                           : b_orthogonal_projection(datum.central_basis, b);
        // W-invariance of chi, exactly
        for (const auto& g : datum.weyl_generators) {
            QMat gm = datum.weyl_on_M(g);
            if (!(mat_vec(gm, chi) == chi))
                throw precondition_error("chi must be W-invariant");
        }
    }

    Rational v_norm_sq(const QVec& w) const { return v_form.norm_sq(w); }
    bool is_dominant(const QVec& lam) const {
        for (const auto& a : datum.simple_roots)
            if (dot(lam, a) < 0) return false;
        return true;
    }
    std::vector<int> levi_simple_indices(const QVec& lam) const {
        std::vector<int> idx;
        for (int i = 0; i < datum.num_simple(); ++i)
            if (dot(lam, datum.simple_roots[i]) == 0) idx.push_back(i);
        return idx;
    }
    std::vector<QVec> fixed_x_weights(const QVec& lam) const {
        std::vector<QVec> out;
        for (const auto& e : x_rep.entries)
            if (dot(lam, e.weight) == 0) out.push_back(e.weight);
        return out;
    }
};

struct IndexingDatum {
    QVec degree;      // d' in N_Q
    QVec lambda;      // weight cocharacter
    Rational mu_sq;   // |lambda|_b^2
    int minimal_cone = -1;
    std::vector<int> levi_simple;   // simple indices with <lambda, alpha_i> = 0
    std::vector<QVec> fixed_weights;  // X-weights with <lambda, beta> = 0
};

enum class ActivityFailure { none, integrality, projection, degree_bound, not_dominant };

inline const char* to_string(ActivityFailure f) {
    switch (f) {
        case ActivityFailure::none: return "active";
        case ActivityFailure::integrality: return "integrality";
        case ActivityFailure::projection: return "projection";
        case ActivityFailure::degree_bound: return "degree_bound";
        case ActivityFailure::not_dominant: return "not_dominant";
    }
    return "?";
}

// Condition (1): <d, psi> in Z for a Z-basis of X*(P_lambda), the characters
// vanishing on the Levi coroots.
inline bool integrality_condition(const StrataContext& ctx, const QVec& d, const QVec& lam) {
    auto levi = ctx.levi_simple_indices(lam);
    std::vector<std::vector<Int>> basis;
    if (levi.empty()) {
        // P = B: every character of T appears
        basis.reserve(ctx.datum.rank);
        for (int i = 0; i < ctx.datum.rank; ++i) {
            std::vector<Int> e(ctx.datum.rank, Int(0));
            e[i] = 1;
            basis.push_back(std::move(e));
        }
    } else {
        ZMat rows(static_cast<int>(levi.size()), ctx.datum.rank);
        for (size_t i = 0; i < levi.size(); ++i)
            for (int j = 0; j < ctx.datum.rank; ++j) {
                const Rational& q = ctx.datum.simple_coroots[levi[i]][j];
                if (denominator(q) != 1)
                    throw precondition_error("integrality test needs integral simple coroots");
                rows(static_cast<int>(i), j) = numerator(q);
            }
        basis = integer_kernel(rows);
    }
    for (const auto& psi : basis) {
        Rational pairing = 0;
        for (int j = 0; j < ctx.datum.rank; ++j) pairing += d[j] * Rational(psi[j]);
        if (denominator(pairing) != 1) return false;
    }
    return true;
}

// Condition (3): if chi^dagger - lambda is outside Im(phi_V) then |d|_V = 0;
// otherwise |d|_V^2 <= (chi^dagger - lambda, phi_V^+(chi^dagger - lambda))_b.
inline bool degree_bound_condition(const StrataContext& ctx, const QVec& d, const QVec& lam) {
    QVec u = ctx.chi_dagger - lam;
    Rational dv = ctx.v_norm_sq(d);
    auto pre = solve(ctx.phi_v.matrix, u);
    if (!pre) return dv == 0;
    return dv <= ctx.b.inner(u, ctx.phi_v_plus.apply(u));
}

inline ActivityFailure classify_activity(const StrataContext& ctx, const QVec& d, const QVec& lam) {
    if (!ctx.is_dominant(lam)) return ActivityFailure::not_dominant;
    auto idx = ctx.sigma_x.minimal_cone_index(lam);
    if (!idx) return ActivityFailure::projection;
    QVec proj = project_onto_span(ctx.sigma_x.cones[*idx], mat_vec(ctx.phi_v.matrix, d) + ctx.chi_dagger, ctx.b);
    if (!(proj == lam)) return ActivityFailure::projection;
    if (!integrality_condition(ctx, d, lam)) return ActivityFailure::integrality;
    if (!degree_bound_condition(ctx, d, lam)) return ActivityFailure::degree_bound;
    return ActivityFailure::none;
}

inline bool is_chi_active(const StrataContext& ctx, const QVec& d, const QVec& lam,
                          ActivityFailure* why = nullptr) {
    ActivityFailure f = classify_activity(ctx, d, lam);
    if (why) *why = f;
    return f == ActivityFailure::none;
}

inline IndexingDatum make_datum(const StrataContext& ctx, const QVec& d, const QVec& lam) {
    IndexingDatum nu;
    nu.degree = d;
    nu.lambda = lam;
    nu.mu_sq = ctx.b.norm_sq(lam);
    auto idx = ctx.sigma_x.minimal_cone_index(lam);
    nu.minimal_cone = idx ? *idx : -1;
    nu.levi_simple = ctx.levi_simple_indices(lam);
    nu.fixed_weights = ctx.fixed_x_weights(lam);
    return nu;
}

// Certified scan radius: condition (3) plus mu <= gamma forces
// |d'|_V <= sqrt(|phi_V^+|_b) * (|chi|_b + gamma). Rational upper bound.
inline Rational certified_scan_radius(const StrataContext& ctx, const Rational& gamma) {
    Rational tol(1, 1000000000000LL);
    Interval opn = operator_norm_enclosure(ctx.phi_v_plus, tol);
    Rational sqrt_opn_ub = rat_sqrt_bounds(opn.hi, Rational(1, 1000000)).ub;
    Rational chi_norm_ub = rat_sqrt_bounds(functional_norm_sq(ctx.chi, ctx.b), Rational(1, 1000000)).ub;
    return sqrt_opn_ub * (chi_norm_ub + gamma);
}

// Core scan: all chi-active (d', lambda) with kernel part d_ker, |d'|_V
// inside the given ball, optional central projection and mu filter.
inline std::vector<IndexingDatum> enumerate_chi_active_in_ball(
    const StrataContext& ctx, const QVec& d_ker, const Rational& r_v,
    const std::optional<QVec>& central_part = std::nullopt,
    const std::optional<Rational>& gamma_filter = std::nullopt) {
    const int n = ctx.datum.rank;
    if (!is_zero(mat_vec(ctx.phi_v.matrix, d_ker)))
        throw precondition_error("kernel part must lie in ker(phi_V)");
    if (central_part && !(mat_vec(ctx.proj_ker, *central_part) == d_ker))
        throw precondition_error("central part is inconsistent with the kernel part");

    // scan directions: the image of phi_V (kernel part is pinned)
    auto im_basis = column_space_basis(
        [&] {
            std::vector<QVec> cols;
            for (int j = 0; j < n; ++j) cols.push_back(column(ctx.phi_v.matrix, j));
            return cols;
        }(),
        n);
    Rational box = 0;
    if (!im_basis.empty()) {
        // smallest generalized eigenvalue of (-,-)_V against Euclid on Im(phi_V)
        QMat s = from_columns(im_basis, n);
        QMat a = mat_mul(transpose(s), mat_mul(ctx.v_form.matrix, s));
        QMat e = mat_mul(transpose(s), s);
        // det(a - mu e) as a poly in mu via char poly of e^{-1} a
        auto einv = inverse(e);
        QPoly p = char_poly(mat_mul(*einv, a));
        SturmChain chain(p);
        if (chain.count_roots(-root_bound(p), Rational(0)) > 0)
            throw precondition_error(
                "unbounded stratum scan: (-,-)_V is not positive definite on Im(phi_V); V is not almost faithful");
        // refine until the enclosure certifies a strictly positive lower bound
        Rational tol(1, 1024);
        std::optional<Interval> mn;
        for (int attempt = 0; attempt < 40; ++attempt) {
            mn = min_positive_root(p, tol);
            if (!mn)
                throw precondition_error("unbounded stratum scan: V-form has no positive spectrum");
            if (mn->lo > 0) break;
            tol /= 1024;
        }
        if (!mn || mn->lo <= 0)
            throw precondition_error("unbounded stratum scan: degenerate V-form");
        Rational mu_lo = mn->lo;
        Rational u_e_sq_ub = r_v * r_v / mu_lo;
        box = rat_sqrt_bounds(u_e_sq_ub, Rational(1, 4)).ub;
    }
    Rational center_inf = 0;
    for (const auto& q : d_ker)
        if (abs(q) > center_inf) center_inf = abs(q);
    if (central_part)
        for (const auto& q : *central_part)
            if (abs(q) > center_inf) center_inf = abs(q);
    long bound_steps = (rat_ceil((box + center_inf) * Rational(ctx.H))).convert_to<long>();

    double total = 1;
    for (int i = 0; i < n; ++i) total *= static_cast<double>(2 * bound_steps + 1);
    if (total > 5e6) throw precondition_error("stratum scan box too large");

    std::vector<IndexingDatum> out;
    std::vector<long> m(n, -bound_steps);
    while (true) {
        QVec dprime(n);
        for (int i = 0; i < n; ++i) dprime[i] = Rational(m[i], ctx.H);
        bool keep = mat_vec(ctx.proj_ker, dprime) == d_ker;
        if (keep && central_part) keep = mat_vec(ctx.proj_central, dprime) == *central_part;
        if (keep && ctx.v_norm_sq(dprime) <= r_v * r_v) {
            QVec target = mat_vec(ctx.phi_v.matrix, dprime) + ctx.chi_dagger;
            for (size_t ci = 0; ci < ctx.sigma_x.cones.size(); ++ci) {
                const Cone& cone = ctx.sigma_x.cones[ci];
                QVec lam = project_onto_span(cone, target, ctx.b);
                if (!cone.in_relative_interior(lam)) continue;
                if (gamma_filter && ctx.b.norm_sq(lam) > *gamma_filter * *gamma_filter) continue;
                if (!is_chi_active(ctx, dprime, lam)) continue;
                out.push_back(make_datum(ctx, dprime, lam));
            }
        }
        int pos = n - 1;
        while (pos >= 0) {
            ++m[pos];
            if (m[pos] <= bound_steps) break;
            m[pos] = -bound_steps;
            --pos;
        }
        if (pos < 0) break;
    }
    std::sort(out.begin(), out.end(), [](const IndexingDatum& a, const IndexingDatum& b2) {
        if (a.mu_sq != b2.mu_sq) return a.mu_sq > b2.mu_sq;
        return std::lexicographical_compare(a.degree.begin(), a.degree.end(), b2.degree.begin(),
                                            b2.degree.end());
    });
    return out;
}

// All chi-active (d', lambda) with mu <= gamma and kernel part d_ker; the
// scan covers the lattice (1/H)N inside the certified |.|_V ball (condition
// (3) plus the mu bound); radius_factor widens it for completeness checks.
inline std::vector<IndexingDatum> enumerate_chi_active(
    const StrataContext& ctx, const QVec& d_ker, const Rational& gamma,
    const std::optional<QVec>& central_part = std::nullopt,
    const Rational& radius_factor = Rational(1)) {
    if (gamma < 0) throw precondition_error("enumerate_chi_active: gamma must be >= 0");
    Rational r_v = certified_scan_radius(ctx, gamma) * radius_factor;
    return enumerate_chi_active_in_ball(ctx, d_ker, r_v, central_part, gamma);
}

// chi'_{lambda,d}(w) = <w, chi> - mu(f_canon) (lambda/|lambda|, w)_b, stored
// as the exact rational functional chi - c * (b lambda) with
// c = ((lambda,d)_V + <lambda,chi>) / (lambda,lambda)_b.
inline QVec shifted_character(const StrataContext& ctx, const QVec& lam, const QVec& d) {
    if (is_zero(lam)) throw precondition_error("shifted character needs lambda != 0");
    Rational num = ctx.v_form.inner(lam, d) + dot(lam, ctx.chi);
    Rational c = num / ctx.b.norm_sq(lam);
    QVec chi_p = ctx.chi - c * mat_vec(ctx.b.matrix, lam);
    // normalization: the shifted functional plus (., d)_V annihilates lambda
    if (dot(lam, chi_p) + ctx.v_form.inner(lam, d) != 0)
        throw std::logic_error("shifted character lost its normalization");
    // W_lambda-invariance on the Levi generators
    for (int i : ctx.levi_simple_indices(lam)) {
        QMat gm = ctx.datum.weyl_on_M(ctx.datum.weyl_generators[i]);
        if (!(mat_vec(gm, chi_p) == chi_p))
            throw std::logic_error("shifted character is not Levi-Weyl invariant");
    }
    return chi_p;
}

// LHS of the graded-semistability inequality: positive means (lambda', d')
// destabilizes the graded point of the (lambda, d)-stratum center.
inline Rational graded_ss_violation(const StrataContext& ctx, const QVec& lam_prime,
                                    const QVec& d_prime, const QVec& lam, const QVec& d) {
    if (is_zero(lam)) throw precondition_error("graded_ss_violation needs lambda != 0");
    Rational mu_term = (ctx.v_form.inner(lam, d) + dot(lam, ctx.chi)) * ctx.b.inner(lam, lam_prime) /
                       ctx.b.norm_sq(lam);
    return ctx.v_form.inner(lam_prime, d_prime) + dot(lam_prime, ctx.chi) - mu_term;
}

struct StratumReport {
    IndexingDatum datum;
    QVec shifted_chi;
};

inline std::vector<StratumReport> stratum_reports(const StrataContext& ctx,
                                                  const std::vector<IndexingDatum>& data) {
    std::vector<StratumReport> out;
    for (const auto& nu : data) {
        StratumReport r;
        r.datum = nu;
        r.shifted_chi = is_zero(nu.lambda) ? ctx.chi : shifted_character(ctx, nu.lambda, nu.degree);
        out.push_back(std::move(r));
    }
    return out;
}

// --- Section 5.1: constraints on the degree of the semistable locus --------

enum class EmptinessVerdict { maybe_nonempty, empty_branch_one, empty_branch_two };

// Requires phi_V^2 = phi_V (b normalized to agree with ch2(V) off the kernel).
inline EmptinessVerdict semistable_empty_bound(const StrataContext& ctx, const QVec& d) {
    if (!(mat_mul(ctx.phi_v.matrix, ctx.phi_v.matrix) == ctx.phi_v.matrix))
        throw precondition_error(
            "semistable_empty_bound requires phi_V^2 = phi_V; renormalize b to match ch2(V)");
    Rational dv = ctx.v_norm_sq(d);
    bool chi_kills_kernel = true;
    for (const auto& k : ctx.ker_phi_basis)
        if (dot(k, ctx.chi) != 0) chi_kills_kernel = false;
    if (chi_kills_kernel) {
        // |chi|_V^2 as a form on N/ker = (chi^dagger, phi_V^+ chi^dagger)_b
        Rational chi_v_sq = ctx.b.inner(ctx.chi_dagger, ctx.phi_v_plus.apply(ctx.chi_dagger));
        return dv > chi_v_sq ? EmptinessVerdict::empty_branch_one : EmptinessVerdict::maybe_nonempty;
    }
    return dv > 0 ? EmptinessVerdict::empty_branch_two : EmptinessVerdict::maybe_nonempty;
}

struct Destabilizer {
    QVec lambda;          // unnormalized candidate (the projection itself)
    int cone_id;
    Rational pairing_sq_over_norms;  // (lambda, psi^dagger)^2_b / (|lambda|^2 |psi^dagger|^2)
};

struct DestabilizerReport {
    std::vector<Destabilizer> list;
    Rational m_sq = 0;  // min over the list; 0 when the list is empty
};

// Kirwan-Ness candidates: b-projections of psi^dagger onto the spans of the
// Sigma_X cones that land in the relative interior and pair positively.
inline DestabilizerReport git_max_destabilizers(const StrataContext& ctx, const QVec& psi) {
    if (is_zero(psi)) throw precondition_error("git_max_destabilizers: psi must be nonzero");
    QVec psi_d = dagger(psi, ctx.b);
    Rational psi_norm_sq = ctx.b.norm_sq(psi_d);
    DestabilizerReport rep;
    for (size_t ci = 0; ci < ctx.sigma_x.cones.size(); ++ci) {
        const Cone& cone = ctx.sigma_x.cones[ci];
        QVec lam = project_onto_span(cone, psi_d, ctx.b);
        if (is_zero(lam)) continue;
        if (!cone.in_relative_interior(lam)) continue;
        Rational pairing = ctx.b.inner(lam, psi_d);
        if (pairing <= 0) continue;  // not destabilizing
        Destabilizer cand;
        cand.lambda = lam;
        cand.cone_id = static_cast<int>(ci);
        cand.pairing_sq_over_norms = pairing * pairing / (ctx.b.norm_sq(lam) * psi_norm_sq);
        rep.list.push_back(std::move(cand));
    }
    for (const auto& c : rep.list)
        if (rep.m_sq == 0 || c.pairing_sq_over_norms < rep.m_sq) rep.m_sq = c.pairing_sq_over_norms;
    return rep;
}

// sign of sqrt(t1) - sqrt(t2) - sqrt(t3) for nonnegative rationals, exact.
inline int cmp_sqrt_minus_sum(const Rational& t1, const Rational& t2, const Rational& t3) {
    Rational s = t1 - t2 - t3;
    if (s < 0) return -1;
    Rational lhs = s * s, rhs = 4 * t2 * t3;
    return lhs > rhs ? 1 : (lhs == rhs ? 0 : -1);
}

struct GenericSSReport {
    Rational m_sq;
    Rational threshold_terms_sq[2];  // |(1-phi_V)d|^2_b and |d|^2_b
    bool chi_exceeds_threshold;
    Rational degree_pairing;  // <d, chi>
    bool degree_constraint_satisfied;
};

// |chi|_b > |(1-phi_V)(d)|_b / m + |d|_b / m^2 decided exactly on squares.
inline GenericSSReport generic_ss_threshold(const StrataContext& ctx, const QVec& d) {
    DestabilizerReport dest = git_max_destabilizers(ctx, ctx.chi);
    bool has_unstable = false;
    for (const auto& e : ctx.x_rep.entries)
        if (dot(dagger(ctx.chi, ctx.b), e.weight) < 0) has_unstable = true;
    if (dest.list.empty() && has_unstable)
        throw precondition_error("generic_ss_threshold: no destabilizers found for unstable weights");
    GenericSSReport rep;
    rep.m_sq = dest.m_sq;
    QVec shifted = d - mat_vec(ctx.phi_v.matrix, d);
    rep.threshold_terms_sq[0] = ctx.b.norm_sq(shifted);
    rep.threshold_terms_sq[1] = ctx.b.norm_sq(d);
    rep.degree_pairing = dot(d, ctx.chi);
    rep.degree_constraint_satisfied = rep.degree_pairing <= 0;
    if (dest.m_sq == 0) {
        rep.chi_exceeds_threshold = is_zero(d);  // the threshold is only vacuous at d = 0
        return rep;
    }
    // compare m^2*|chi| vs m*A + B on squares: t1 = m^4 |chi|^2,
    // t2 = m^2 A^2, t3 = B^2
    Rational chi_sq = functional_norm_sq(ctx.chi, ctx.b);
    Rational t1 = dest.m_sq * dest.m_sq * chi_sq;
    Rational t2 = dest.m_sq * rep.threshold_terms_sq[0];
    Rational t3 = rep.threshold_terms_sq[1];
    rep.chi_exceeds_threshold = cmp_sqrt_minus_sum(t1, t2, t3) > 0;
    return rep;
}

}  // namespace thetastrat
