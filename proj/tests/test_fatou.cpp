#include "doctest.h"
#include "dulac/fatou.hpp"
#include "helpers.hpp"

using namespace dulac;
using namespace dulac::testing;

namespace {

FormalInvariants mk_inv(Rat alpha, long m, CQ rho) {
    FormalInvariants i;
    i.alpha = std::move(alpha);
    i.m = m;
    i.rho = rho;
    return i;
}

TS fF(Rat alpha, long m, CQ rho, const Basis& b, const Budget& t) {
    return model_germ(mk_inv(std::move(alpha), m, std::move(rho)), ModelKind::f_F, b, t);
}

}  // namespace

TEST_CASE("solve_abel: z - z^2 starts 1/z + log z") {
    Budget t = bud(6, 6);
    auto psi = solve_abel(ts("z - z^2", b1(), t), t);
    CHECK(psi.body.coeff_at(Rat(-1), 0) == CQ(1));
    CHECK(psi.body.coeff_at(Rat(0), -1) == CQ(-1));  // + log z = -l^-1
    CHECK(psi.body.coeff_at(Rat(0), 0, -1) == CQ(0));
    CHECK(psi.body.coeff_at(Rat(0), 0, 0) == CQ(0));  // constant pinned to 0
}

TEST_CASE("solve_abel: exact coordinate of the model flow") {
    // f_1(2,0,0) has Fatou coordinate exactly 1/z + log z.  The model is
    // itself a truncation, so the top two orders of psi see the missing
    // tail (through z^-1 o f); compare on the truncation-safe window.
    Budget t = bud(6, 8);
    TS f1 = model_germ(mk_inv(Rat(2), 0, CQ(0)), ModelKind::f_1, b1(), t);
    auto psi = solve_abel(f1, t);
    CHECK(equal_up_to(psi.body, ts("z^-1 - l^-1", b1(), t), bud(3, 8)));
    CHECK(abel_residual(f1, psi.body).is_zero());
}

TEST_CASE("solve_abel: leading block for m = 1") {
    Budget t = bud(6, 8);
    auto psi = solve_abel(ts("z - z^2*l^1", b1(), t), t);
    // Psi_1 = -int z^-2 l^-1 (1/(1+...)) dz = z^-1 l^-1 - z^-1 + ...
    CHECK(psi.body.coeff_at(Rat(-1), -1) == CQ(1));
    auto [e, blk] = leading_block(psi.body);
    CHECK(e == -1);
    CHECK(blk.at({-1, 0}) == CQ(1));
}

TEST_CASE("solve_abel: leading asymptotics for a != 1") {
    Budget t = bud(5, 7);
    TS f = TS::identity(b1(), t);
    f.add_term(Rat(2), 1, 0, CQ(-2));  // a = 2, alpha = 2, m = 1
    f.add_term(Rat(3), 0, 0, CQ(1));
    auto psi = solve_abel(f, t);
    CHECK(psi.body.leading_key() == MonKey{Rat(-1), -1, 0});
    CHECK(psi.body.leading_coeff() == CQ(Rat(1, 2)));  // 1/(a(alpha-1))
}

TEST_CASE("abel_residual: defining equation, sensitivity, constants") {
    Budget t = bud(6, 6);
    TS f = ts("z - z^2 + 1/2*z^3*l^1", b1(), t);
    auto psi = solve_abel(f, t);
    TS r = abel_residual(f, psi.body);
    CHECK(r.is_zero());

    TS perturbed = psi.body + ts("z^2", b1(), t);
    TS r2 = abel_residual(f, perturbed);
    CHECK(!r2.is_zero());
    CHECK(r2.leading_key().z == 3);  // d/dz z^2 * (-z^2) enters at z^3

    TS shifted = psi.body + ts("5", b1(), t);
    CHECK(abel_residual(f, shifted) == r);
}

TEST_CASE("invariants_from_fatou: the f_F suite") {
    Budget t = bud(6, 8);
    struct Row {
        Rat alpha;
        long m;
        CQ rho;
    };
    for (auto& row : {Row{Rat(2), 0, CQ(0)}, Row{Rat(2), 1, CQ(Rat(1, 3))},
                      Row{Rat(3), -1, CQ(0)}}) {
        Budget tt = row.alpha == 3 ? bud(7, 8) : t;
        TS f = fF(row.alpha, row.m, row.rho, b1(), tt);
        auto psi = solve_abel(f, tt);
        auto inv = invariants_from_fatou(psi, row.alpha);
        CHECK(inv.alpha == row.alpha);
        CHECK(inv.m == row.m);
        REQUIRE(inv.rho.has_value());
        CHECK(*inv.rho == row.rho);
    }
}

TEST_CASE("two rho-extraction routes agree on random germs") {
    std::mt19937_64 rng(121);
    Budget t = bud(7, 6);
    std::uniform_int_distribution<int> num(-4, 4), den(1, 3), le(0, 2), mm(-1, 1);
    for (int it = 0; it < 12; ++it) {
        long m = mm(rng);
        TS f = TS::identity(b1(), t);
        f.add_term(Rat(2), int(m), 0, CQ(-1));
        for (int j = 0; j < 4; ++j) {
            std::uniform_int_distribution<long> zn(3, 5);
            f.add_term(Rat(zn(rng)), int(le(rng) + m), 0, CQ(frac(num(rng), den(rng))));
        }
        auto red = reduce_to_normal_form(f);
        REQUIRE(red.inv.rho.has_value());
        auto psi = solve_abel(red.reduced, t);
        auto inv2 = invariants_from_fatou(psi, red.inv.alpha);
        CHECK(inv2.alpha == red.inv.alpha);
        CHECK(inv2.m == red.inv.m);
        CHECK(inv2.rho == red.inv.rho);
    }
}

TEST_CASE("fatou of a non-reduced germ still carries (m/2 + rho) on l2^-1") {
    Budget t = bud(7, 7);
    TS f = ts("z - z^2 + z^3 - 2*z^4*l^1", b1(), t);
    auto red = reduce_to_normal_form(f);
    REQUIRE(red.inv.rho.has_value());
    auto psi = solve_abel(f, t);
    CHECK(psi.body.coeff_at(Rat(0), 0, -1) ==
          *red.inv.rho - CQ(frac(red.inv.m, 2)));
}

TEST_CASE("uniqueness: deeper working precision does not change the result") {
    Budget t = bud(6, 6);
    TS f = ts("z - z^2*l^1 + z^3*l^-1", b1(), t);
    auto p1 = solve_abel(f, t);
    auto p2 = solve_abel(f.with_budget(bud(6, 12)), t);
    CHECK(equal_up_to(p1.body, p2.body, t));
}

TEST_CASE("exponent structure: beta_1 = 1 - alpha, finitely many negative") {
    Budget t = bud(6, 8);
    TS f = fF(Rat(3), -1, CQ(0), b2(), bud(7, 8));
    auto psi = solve_abel(f, bud(7, 8));
    auto blocks = psi.body.block_exponents();
    REQUIRE(!blocks.empty());
    CHECK(blocks.front() == Rat(-2));  // 1 - alpha
    int negatives = 0;
    for (auto& b : blocks)
        if (b < 0) ++negatives;
    CHECK(negatives <= 3);
}
