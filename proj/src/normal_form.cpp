#include "dulac/normal_form.hpp"

namespace dulac {

TS model_field(const FormalInvariants& inv, const Basis& basis, const Budget& budget) {
    CQ rho = inv.rho.value_or(CQ(0));
    // X_1 = -z^alpha l^m / (1 - (alpha/2) z^{alpha-1} l^m + (rho - m/2) z^{alpha-1} l^{m+1});
    // the l^{m+1} coefficient equals the l2^-1 coefficient of the flow's
    // Fatou coordinate, which is rho - m/2 for residual invariant rho.
    TS den = TS::constant(CQ(1), basis, budget);
    den.add_term(inv.alpha - 1, int(inv.m), 0, CQ(-inv.alpha / 2));
    den.add_term(inv.alpha - 1, int(inv.m + 1), 0, rho - CQ(frac(inv.m, 2)));
    TS num = TS::monomial(CQ(-1), inv.alpha, int(inv.m), 0, basis, budget);
    return divide(num, den);
}

namespace {

TS aux_field(const std::map<int, CQ>& T0, const Rat& alpha, const CQ& b, const Basis& basis,
             const Budget& budget) {
    TS t0 = TS::zero(basis, budget);
    for (auto& [k, c] : T0) t0.add_term(Rat(0), k, 0, c);
    // z^alpha T0 / (1 + (alpha/2) z^{alpha-1} T0 + b z^{alpha-1} T0 l)
    TS den = TS::constant(CQ(1), basis, budget) +
             t0.shifted(CQ(alpha / 2), alpha - 1, 0, 0) + t0.shifted(b, alpha - 1, 1, 0);
    return divide(t0.shifted(CQ(1), alpha, 0, 0), den);
}

CQ residual_of(const TS& f) {
    auto red = reduce_to_normal_form(f);
    if (!red.inv.rho) throw precondition_error("model_germ: budget below the residual block");
    return *red.inv.rho;
}

}  // namespace

TS model_germ(const FormalInvariants& inv, ModelKind kind, const Basis& basis,
              const Budget& budget, const std::optional<std::map<int, CQ>>& T0) {
    CQ rho = inv.rho.value_or(CQ(0));
    switch (kind) {
        case ModelKind::f_F: {
            TS f = TS::identity(basis, budget);
            f.add_term(inv.alpha, int(inv.m), 0, CQ(-1));
            f.add_term(2 * inv.alpha - 1, int(2 * inv.m + 1), 0, rho);
            return f;
        }
        case ModelKind::f_1:
            return formal_flow(model_field(inv, basis, budget), CQ(1));
        case ModelKind::f_2: {
            std::map<int, CQ> t0 = T0.value_or(std::map<int, CQ>{{int(inv.m), CQ(-1)}});
            if (t0.empty() || t0.begin()->first != inv.m || t0.begin()->second != CQ(-1))
                throw precondition_error("model_germ: T0 must have leading term -l^m");
            // rho depends affinely on b; match it with two evaluations.
            CQ r0 = residual_of(formal_flow(aux_field(t0, inv.alpha, CQ(0), basis, budget), CQ(1)));
            CQ r1 = residual_of(formal_flow(aux_field(t0, inv.alpha, CQ(1), basis, budget), CQ(1)));
            if (r1 == r0)
                throw precondition_error("model_germ: residual coefficient does not depend on b");
            CQ b = (rho - r0) / (r1 - r0);
            return formal_flow(aux_field(t0, inv.alpha, b, basis, budget), CQ(1));
        }
    }
    throw precondition_error("model_germ: unknown model kind");
}

TS formal_conjugacy(const TS& f, const TS& g) {
    auto rf = reduce_to_normal_form(f);
    auto rg = reduce_to_normal_form(g);
    auto show = [](const FormalInvariants& i) {
        std::string s = "(" + rat_str(i.alpha) + ", " + std::to_string(i.m) + ", ";
        s += i.rho ? cq_str(*i.rho) : std::string("?");
        return s + ")";
    };
    if (!(rf.inv == rg.inv))
        throw precondition_error("formal_conjugacy: invariant mismatch " + show(rf.inv) +
                                 " vs " + show(rg.inv));
    Basis bs = f.basis().merged(g.basis());
    Budget bud = f.budget().min(g.budget());
    TS phi_f = rf.chart(bs, bud);
    TS phi_g = rg.chart(bs, bud);
    return compose_parabolic(phi_f, invert_series(phi_g));
}

}  // namespace dulac
