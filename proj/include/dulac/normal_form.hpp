#pragma once

// Blockwise reduction of a normalized parabolic transseries
//   f = z - z^alpha l^m + h.o.b.
// to the (alpha, m, rho) normal forms, by elementary changes of variables
// phi_i = z + z^{gamma_i} R_i(l).  Higher blocks z^beta T(l) are removed by
// solving the Lie bracket equation
//   [-z^alpha l^m, z^gamma R] = -z^beta T,   gamma = beta - alpha + 1,
// which reduces to the linear ODE
//   ((alpha-gamma) l^-2 + m l^-1) R - R' = l^{-m-2} T,
// solved termwise.  At the residual block beta = 2 alpha - 1 the monomial
// l^{2m+1} cannot be produced by the left-hand side and survives; its
// coefficient is the residual invariant rho.  The first block (beta = alpha,
// gamma = 1) is eliminated by triangular coefficient matching instead.

#include <optional>
#include <vector>

#include "dulac/series.hpp"

namespace dulac {

template <class C>
struct InvariantsT {
    Rat alpha;
    long m = 0;
    std::optional<C> rho;  // absent when the budget did not reach z^{2 alpha - 1}

    friend bool operator==(const InvariantsT& x, const InvariantsT& y) {
        return x.alpha == y.alpha && x.m == y.m && x.rho == y.rho;
    }
};
using FormalInvariants = InvariantsT<CQ>;

enum class StepKind { first_block, higher_block, residual_block };

template <class C>
struct EliminationStep {
    StepKind kind = StepKind::higher_block;
    Rat gamma;
    std::map<int, C> R;  // Laurent coefficients of R(l)

    Series<C> change(const Basis& b, const Budget& t) const {
        Series<C> out = Series<C>::identity(b, t);
        for (auto& [le, c] : R) out.add_term(gamma, le, 0, c);
        return out;
    }
};

template <class C>
struct Reduction {
    InvariantsT<C> inv;
    std::vector<EliminationStep<C>> steps;
    Series<C> reduced;
    bool reached_residual = false;

    // Composite change Phi = phi_0 o phi_1 o ... with Phi^{-1} o f o Phi = reduced.
    Series<C> chart(const Basis& b, const Budget& t) const {
        Series<C> out = Series<C>::identity(b, t);
        for (auto& s : steps) out = compose_parabolic(out, s.change(b, t));
        return out;
    }
};

namespace nf_detail {

template <class C>
bool negligible(const C& c, double eps) {
    if (coeff<C>::exact) return coeff<C>::is_zero(c);
    return coeff<C>::mag(c) <= eps;
}

template <class C>
Series<C> conjugate_by(const Series<C>& f, const Series<C>& phi) {
    return compose_parabolic(compose_parabolic(invert_series(phi), f), phi);
}

// Leading data of a normalized parabolic series: alpha and m with
// f = z - z^alpha l^m + ...; throws if not normalized.
template <class C>
std::pair<Rat, long> leading_data(const Series<C>& f) {
    if (f.is_zero() || !(f.leading_key() == MonKey{Rat(1), 0, 0}) ||
        !(f.leading_coeff() == coeff<C>::one()))
        throw precondition_error("series is not parabolic with unit leading term");
    auto blocks = f.block_exponents();
    if (f.block(Rat(1)).size() != 1)
        throw precondition_error("unexpected terms l^k at z-order 1");
    if (blocks.size() < 2) throw precondition_error("no correction block within budget");
    Rat alpha = blocks[1];
    if (!(alpha > 1)) throw precondition_error("correction block at z-order <= 1");
    auto blk = f.block(alpha);
    auto lead = blk.begin();
    if (lead->first.second != 0) throw precondition_error("l2 terms in the leading block");
    if (!(lead->second == -coeff<C>::one()))
        throw precondition_error("germ not normalized: leading block coefficient is not -1");
    return {alpha, lead->first.first};
}

}  // namespace nf_detail

// Remove the block z^beta T(l), beta > alpha, from f = z - z^alpha l^m + ...
// Returns the elementary step and the conjugated series.  When beta ==
// 2 alpha - 1 the monomial rho z^{2 alpha - 1} l^{2m+1} is left in place.
template <class C>
std::pair<EliminationStep<C>, Series<C>> eliminate_higher_block(const Series<C>& f,
                                                                const Rat& alpha, long m,
                                                                const Rat& beta,
                                                                double zero_eps = 0.0) {
    if (!(beta > alpha)) throw precondition_error("eliminate_higher_block: need beta > alpha");
    EliminationStep<C> step;
    step.gamma = beta - alpha + 1;
    bool residual = (beta == 2 * alpha - 1);
    step.kind = residual ? StepKind::residual_block : StepKind::higher_block;

    auto blk = f.block(beta);
    std::map<int, C> T;
    for (auto& [le, c] : blk) {
        if (le.second != 0)
            throw precondition_error("eliminate_higher_block: block carries l2 terms");
        if (!nf_detail::negligible(c, zero_eps)) T[le.first] = c;
    }
    if (residual) T.erase(int(2 * m + 1));
    if (T.empty()) return {step, f};  // identity step

    const int l_depth = f.budget().l_depth;
    if (residual) {
        // m l^-1 R - R' = l^{-m-2} T  =>  r_j = t_{j+m+1} / (m - j)
        for (auto& [k, t] : T) {
            long j = k - m - 1;
            if (j > l_depth) continue;  // beyond l-resolution, stays as clipped dust
            step.R[int(j)] = t * coeff<C>::inv(coeff<C>::from_long(m - j));
        }
    } else {
        // ((alpha-gamma) l^-2 + m l^-1) R - R' = l^{-m-2} T, termwise ascending:
        //   (alpha-gamma) r_{s+2} + (m-s-1) r_{s+1} = t_{s+m+2}
        C inv_ag = coeff<C>::inv(coeff<C>::from_rat(alpha - step.gamma));
        int k0 = T.begin()->first;
        long s = k0 - m - 2;
        C prev = coeff<C>::zero();  // r_{s+1}
        while (s + 2 <= l_depth) {
            auto it = T.find(int(s + m + 2));
            C t = it == T.end() ? coeff<C>::zero() : it->second;
            C r = (t - prev * coeff<C>::from_long(m - s - 1)) * inv_ag;
            if (!coeff<C>::is_zero(r)) step.R[int(s + 2)] = r;
            prev = r;
            ++s;
            if (nf_detail::negligible(prev, zero_eps) && (T.empty() || s + m + 2 > T.rbegin()->first))
                break;  // recursion has died out and no further sources
        }
    }
    Series<C> phi = step.change(f.basis(), f.budget());
    return {step, nf_detail::conjugate_by(f, phi)};
}

// Normalize the first block: find phi_0 = z + z R_0(l), R_0 in l*C[[l]],
// such that the z^alpha block of the conjugate is exactly -l^m.  Solved by
// triangular matching: conjugating by z + r z l^j shifts the z^alpha block's
// l^{m+j} coefficient by r (1 - alpha), one new unknown per l-degree.
template <class C>
std::pair<EliminationStep<C>, Series<C>> eliminate_first_block(const Series<C>& f,
                                                               double zero_eps = 0.0) {
    auto [alpha, m] = nf_detail::leading_data(f);
    EliminationStep<C> step;
    step.kind = StepKind::first_block;
    step.gamma = 1;

    const Basis& bs = f.basis();
    const Budget& bud = f.budget();
    C inv_am1 = coeff<C>::inv(coeff<C>::from_rat(alpha - 1));

    Series<C> cur = f;
    Series<C> phi = Series<C>::identity(bs, bud);
    for (int j = 1; m + j <= bud.l_depth; ++j) {
        C cj = cur.coeff_at(alpha, int(m + j));
        if (nf_detail::negligible(cj, zero_eps)) continue;
        Series<C> psi = Series<C>::identity(bs, bud);
        psi.add_term(Rat(1), j, 0, cj * inv_am1);
        cur = nf_detail::conjugate_by(cur, psi);
        phi = compose_parabolic(phi, psi);
    }
    for (auto& [k, c] : phi.terms())
        if (k.z == 1 && k.l > 0) step.R[k.l] = c;
    return {step, cur};
}

template <class C>
Reduction<C> reduce_to_normal_form(const Series<C>& f, double zero_eps = 0.0) {
    auto [alpha, m] = nf_detail::leading_data(f);
    Reduction<C> red;
    red.inv.alpha = alpha;
    red.inv.m = m;

    Rat res_exp = 2 * alpha - 1;
    const Budget& bud = f.budget();

    auto [step0, cur] = eliminate_first_block(f, zero_eps);
    if (!step0.R.empty()) red.steps.push_back(step0);

    bool residual_done = false;
    long guard = 0;
    while (true) {
        if (++guard > 10000) throw precondition_error("reduction did not terminate");
        // Smallest offending block above alpha.  A source monomial l^k is
        // resolvable only if the elementary change it requires fits in the
        // l-budget (index k - m, or k - m - 1 in the residual case); content
        // above that is clipped dust and is left alone.
        std::optional<Rat> next;
        for (auto& beta : cur.block_exponents()) {
            if (!(beta > alpha) || beta > bud.z_order) continue;
            bool residual = (beta == res_exp);
            long kmax = bud.l_depth + m + (residual ? 1 : 0);
            auto blk = cur.block(beta);
            bool offending = false;
            for (auto& [le, c] : blk) {
                if (residual && le.first == 2 * m + 1 && le.second == 0) continue;
                if (le.first > kmax) continue;
                if (!nf_detail::negligible(c, zero_eps)) {
                    offending = true;
                    break;
                }
            }
            if (offending) {
                next = beta;
                break;
            }
        }
        if (!next) break;
        auto [step, out] = eliminate_higher_block(cur, alpha, m, *next, zero_eps);
        if (*next == res_exp) residual_done = true;
        if (!step.R.empty()) red.steps.push_back(step);
        cur = std::move(out);
    }

    red.reached_residual = residual_done || res_exp <= bud.z_order;
    if (red.reached_residual) red.inv.rho = cur.coeff_at(res_exp, int(2 * m + 1));
    red.reduced = std::move(cur);
    return red;
}

enum class ModelKind { f_F, f_1, f_2 };

// The (alpha, m, rho) models: f_F exactly, f_1 and f_2 as truncated Lie
// series of their defining fields.  For f_2 the scalar b in the field
//   z^alpha T0 / (1 + (alpha/2) z^{alpha-1} T0 + b z^{alpha-1} T0 l)
// is fixed by one affine match on the residual coefficient.
TS model_germ(const FormalInvariants& inv, ModelKind kind, const Basis& basis,
              const Budget& budget, const std::optional<std::map<int, CQ>>& T0 = std::nullopt);

// X_1 field coefficient of the (alpha, m, rho) model.
TS model_field(const FormalInvariants& inv, const Basis& basis, const Budget& budget);

// Formal conjugacy phi with phi^{-1} o f o phi = g, from the recorded step
// sequences of the two reductions; throws on invariant mismatch.
TS formal_conjugacy(const TS& f, const TS& g);

}  // namespace dulac
