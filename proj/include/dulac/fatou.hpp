#pragma once

// Formal Fatou coordinate of a parabolic transseries via the Abel equation
//   Psi o f - Psi = 1,
// built block-by-block from the Taylor expansion
//   Psi'(z) g(z) + Psi''(z) g(z)^2 / 2! + ... = 1,   g = f - id.
// Each stage solves  Psi_next' * z^alpha G1(l) = leading block of the
// residual, divides by the first block G1 (a Laurent series in l) and
// integrates formally; integration across z^-1 produces the log monomials
// -l^-1 (log z) and -l2^-1 (log l).  The constant term is pinned to 0.

#include "dulac/normal_form.hpp"
#include "dulac/series.hpp"

namespace dulac {

template <class C>
struct FatouSeriesT {
    Series<C> body;        // constant term 0
    Rat alpha;             // 1 - (leading z-exponent)
    bool log_stage = false;  // the z^{alpha-1} stage of the Abel recursion ran

    const Series<C>& series() const { return body; }
};
using FatouSeries = FatouSeriesT<CQ>;

// Abel residual  Psi o f - Psi - 1  (exact-zero up to budget for a valid pair).
template <class C>
Series<C> abel_residual(const Series<C>& f, const Series<C>& psi) {
    Series<C> one = Series<C>::constant(coeff<C>::one(), f.basis(), f.budget().min(psi.budget()));
    return compose_parabolic(psi, f) - psi - one;
}

template <class C>
FatouSeriesT<C> solve_abel(const Series<C>& f, const Budget& budget) {
    if (f.is_zero() || !(f.leading_key() == MonKey{Rat(1), 0, 0}))
        throw precondition_error("solve_abel: series is not parabolic");
    Series<C> g = f - Series<C>::identity(f.basis(), f.budget());
    if (g.is_zero()) throw precondition_error("solve_abel: the identity has no Fatou coordinate");
    Rat alpha = g.leading_key().z;
    if (!(alpha > 1)) throw precondition_error("solve_abel: correction has z-order <= 1");
    long m_lead = g.leading_key().l;

    // Internal depth slack: divisions by G1 shift l-exponents down by up to
    // max(m,0) per stage, and there are at most z_order*denom + 2 stages.
    long stages = long((budget.z_order).get_d() * double(f.basis().denom)) + 2;
    int slack = int(std::min<long>(30, std::max<long>(0, m_lead) * stages + 4));
    Budget work(budget.z_order, budget.l_depth + slack);

    Series<C> fw = f.with_budget(work);
    Series<C> gw = fw - Series<C>::identity(f.basis(), work);
    Series<C> G1 = from_block(gw.block(alpha), Rat(0), f.basis(), work);
    {
        auto lead = G1.leading_key();
        if (lead.l2 != 0) throw precondition_error("solve_abel: leading block carries l2 terms");
    }
    Series<C> invG1 = reciprocal(G1);

    FatouSeriesT<C> out;
    out.alpha = alpha;
    Series<C> psi = Series<C>::zero(f.basis(), work);
    Series<C> E = Series<C>::constant(coeff<C>::one(), f.basis(), work);
    long guard = 0;
    while (!E.is_zero()) {
        if (++guard > 100000) throw precondition_error("solve_abel did not terminate");
        Rat e = E.leading_key().z;
        if (e > work.z_order) break;
        Rat beta = e - alpha + 1;  // next Psi block exponent
        if (beta > work.z_order) break;
        if (e >= alpha - 1) out.log_stage = true;
        Series<C> Eblk = from_block(E.block(e), Rat(0), f.basis(), work);
        Series<C> psi_prime = (Eblk * invG1).shifted(coeff<C>::one(), e - alpha, 0, 0);
        Series<C> psi_next = integrate_z(psi_prime);
        if (psi_next.is_zero()) {
            // the whole block lies beyond working l-resolution; unprocessable dust
            E = E - from_block(E.block(e), e, f.basis(), work);
            psi.mark_clipped();
            continue;
        }
        psi = psi + psi_next;
        // incremental update of E = 1 - (Psi o f - Psi)
        E = E - (compose_parabolic(psi_next, fw) - psi_next);
    }
    if (E.is_zero()) out.log_stage = true;  // Abel equation solved exactly
    out.body = psi.with_budget(budget);
    return out;
}

// Read (alpha, m, rho) from the Fatou coordinate:
//   m    = -(leading l-exponent),
//   rho  = coeff(l2^-1) + m/2.
// With the Abel orientation Psi o f - Psi = 1 the coordinate of
// f_F(alpha, m, rho) carries (rho - m/2) l2^-1; this is the reading that is
// invariant under parabolic conjugation and therefore matches the residual
// coefficient surviving the blockwise reduction.
template <class C>
InvariantsT<C> invariants_from_fatou(const FatouSeriesT<C>& psi, const Rat& alpha) {
    if (psi.body.is_zero()) throw precondition_error("invariants_from_fatou: zero coordinate");
    const MonKey& lk = psi.body.leading_key();
    InvariantsT<C> inv;
    inv.alpha = 1 - lk.z;
    if (inv.alpha != alpha)
        throw precondition_error("invariants_from_fatou: leading exponent inconsistent with alpha");
    inv.m = -lk.l;
    if (!psi.log_stage)
        throw precondition_error(
            "invariants_from_fatou: budget too small to reach the l2^-1 monomial");
    C c = psi.body.coeff_at(Rat(0), 0, -1);
    inv.rho = c + coeff<C>::from_rat(frac(inv.m, 2));
    return inv;
}

}  // namespace dulac
