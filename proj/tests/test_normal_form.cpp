#include "doctest.h"
#include "dulac/fatou.hpp"
#include "dulac/normal_form.hpp"
#include "helpers.hpp"

using namespace dulac;
using namespace dulac::testing;

namespace {

// [f, g] = f' g - g' f
TS lie_bracket(const TS& f, const TS& g) { return derive_z(f) * g - derive_z(g) * f; }

TS step_change(const EliminationStep<CQ>& s, const Basis& b, const Budget& t) {
    return s.change(b, t);
}

FormalInvariants inv_of(Rat alpha, long m, CQ rho) {
    FormalInvariants i;
    i.alpha = std::move(alpha);
    i.m = m;
    i.rho = rho;
    return i;
}

}  // namespace

TEST_CASE("eliminate_higher_block: z^{5/2} block, bracket certificate") {
    Basis b = b2();
    Budget t = bud(6, 6);
    TS f = ts("z - z^2 + z^5/2", b, t);
    auto [step, out] = eliminate_higher_block(f, Rat(2), 0, Rat(5, 2));
    CHECK(step.gamma == Rat(3, 2));
    CHECK(step.R.size() == 1);
    CHECK(step.R.at(0) == CQ(2));  // phi = z + 2 z^{3/2}
    // [-z^2, 2 z^{3/2}] = -z^{5/2}
    TS lhs = lie_bracket(ts("-z^2", b, t), ts("2*z^3/2", b, t));
    CHECK(lhs == ts("-z^5/2", b, t));
    CHECK(out.coeff_at(Rat(5, 2), 0) == CQ(0));
}

TEST_CASE("eliminate_higher_block: residual case gamma = alpha") {
    Budget t = bud(6, 6);
    TS f = ts("z - z^2 + z^3", b1(), t);
    auto [step, out] = eliminate_higher_block(f, Rat(2), 0, Rat(3));
    CHECK(step.gamma == 2);
    CHECK(step.kind == StepKind::residual_block);
    CHECK(step.R.size() == 1);
    CHECK(step.R.at(-1) == CQ(1));  // R = l^-1, from -int l^-2 dl = l^-1
    CHECK(out.coeff_at(Rat(3), 0) == CQ(0));
}

TEST_CASE("eliminate_higher_block: absent block gives the identity step") {
    TS f = ts("z - z^2");
    auto [step, out] = eliminate_higher_block(f, Rat(2), 0, Rat(4));
    CHECK(step.R.empty());
    CHECK(out == f);
}

TEST_CASE("eliminate_first_block: already normal") {
    TS f = ts("z - z^2*l^1 + z^3");
    auto [step, out] = eliminate_first_block(f);
    CHECK(step.R.empty());
    CHECK(out == f);
}

TEST_CASE("eliminate_first_block: T0 = -1 + l") {
    Budget t = bud(6, 8);
    TS f = ts("z - z^2 + z^2*l^1", b1(), t);
    auto [step, out] = eliminate_first_block(f);
    CHECK(!step.R.empty());
    auto blk = out.block(Rat(2));
    REQUIRE(blk.size() == 1);
    CHECK(blk.at({0, 0}) == CQ(-1));  // z^2-block reduced to exactly -1
}

TEST_CASE("eliminate_first_block: random second coefficient") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
    Budget t = bud(6, 7);
    for (int it = 0; it < 6; ++it) {
        CQ c{frac(num(rng), den(rng))};
        TS f = ts("z - z^2*l^1", b1(), t);
        f.add_term(Rat(2), 2, 0, c);
        auto [step, out] = eliminate_first_block(f);
        auto blk = out.block(Rat(2));
        REQUIRE(!blk.empty());
        for (auto& [le, cc] : blk) {
            if (le.first == 1)
                CHECK(cc == CQ(-1));
            else
                CHECK(cc == CQ(0));
        }
    }
}

TEST_CASE("reduce_to_normal_form: f_F fixed points (idempotence)") {
    Budget t = bud(6, 6);
    TS fF = ts("z - z^2 + 1/2*z^3*l^1", b1(), t);
    auto red = reduce_to_normal_form(fF);
    CHECK(red.inv.alpha == 2);
    CHECK(red.inv.m == 0);
    REQUIRE(red.inv.rho.has_value());
    CHECK(*red.inv.rho == CQ(Rat(1, 2)));
    CHECK(red.steps.empty());
    CHECK(red.reduced == fF);
}

TEST_CASE("reduce_to_normal_form: z - z^2 + z^3 and idempotence of the output") {
    Budget t = bud(7, 7);
    TS f = ts("z - z^2 + z^3", b1(), t);
    auto red = reduce_to_normal_form(f);
    REQUIRE(red.inv.rho.has_value());
    auto red2 = reduce_to_normal_form(red.reduced);
    CHECK(red2.inv == red.inv);
    CHECK(red2.steps.empty());
    // the reduced series is exactly the f_F model
    TS model = model_germ(red.inv, ModelKind::f_F, f.basis(), t);
    CHECK(equal_up_to(red.reduced, model, t));
}

TEST_CASE("reduce_to_normal_form: flow of the model field has its invariants") {
    Budget t = bud(6, 8);
    TS f1 = model_germ(inv_of(Rat(2), 1, CQ(0)), ModelKind::f_1, b1(), t);
    CHECK(f1.coeff_at(Rat(2), 1) == CQ(-1));
    auto red = reduce_to_normal_form(f1);
    CHECK(red.inv.alpha == 2);
    CHECK(red.inv.m == 1);
    REQUIRE(red.inv.rho.has_value());
    CHECK(*red.inv.rho == CQ(0));
}

TEST_CASE("model_germ: f_F(2,1,0) and f_1 Lie series") {
    Budget t = bud(5, 6);
    CHECK(model_germ(inv_of(Rat(2), 1, CQ(0)), ModelKind::f_F, b1(), t) ==
          ts("z - z^2*l^1", b1(), t));
    // f_1(2,0,0): field -z^2/(1 - z); Exp gives z - z^2 - z^3/2 - ...
    TS f1 = model_germ(inv_of(Rat(2), 0, CQ(0)), ModelKind::f_1, b1(), t);
    TS xi = divide(ts("-z^2", b1(), t), ts("1 - z", b1(), t));
    TS manual = TS::identity(b1(), t);
    TS it = TS::identity(b1(), t);
    Rat fact(1);
    for (long k = 1; k <= 12; ++k) {
        it = xi * derive_z(it);
        fact *= k;
        manual = manual + it.scaled(CQ(Rat(1) / fact));
    }
    CHECK(equal_up_to(f1, manual, t));
}

TEST_CASE("model_germ: f_2 reproduces the requested invariants") {
    Budget t = bud(7, 8);
    for (auto rho : {CQ(0), CQ(Rat(1, 3)), CQ(Rat(-2, 5))}) {
        auto inv = inv_of(Rat(2), 0, rho);
        std::map<int, CQ> T0{{0, CQ(-1)}, {2, CQ(Rat(1, 2))}};
        TS f2 = model_germ(inv, ModelKind::f_2, b1(), t, T0);
        auto red = reduce_to_normal_form(f2);
        CHECK(red.inv == inv);
        // unchanged initial block
        CHECK(f2.coeff_at(Rat(2), 0) == CQ(-1));
        CHECK(f2.coeff_at(Rat(2), 2) == CQ(Rat(1, 2)));
    }
}

TEST_CASE("model_germ: f_2 coincides with f_1 at T0 = -l^m") {
    Budget t = bud(6, 7);
    auto inv = inv_of(Rat(2), 0, CQ(Rat(1, 4)));
    TS f2 = model_germ(inv, ModelKind::f_2, b1(), t);
    auto red = reduce_to_normal_form(f2);
    CHECK(red.inv == inv);
}

TEST_CASE("formal_conjugacy: post-condition and error") {
    Budget t = bud(6, 7);
    TS f = ts("z - z^2", b1(), t);
    auto rho_f = reduce_to_normal_form(f).inv;
    TS g = model_germ(rho_f, ModelKind::f_F, b1(), t);
    TS phi = formal_conjugacy(f, g);
    TS conj = compose_parabolic(compose_parabolic(invert_series(phi), f), phi);
    CHECK(equal_up_to(conj, g, t));

    TS h = ts("z - z^2*l^1", b1(), t);  // different m
    CHECK_THROWS_AS(formal_conjugacy(f, h), precondition_error);
}

TEST_CASE("properties: bracket certificates and gamma monotonicity on random germs") {
    std::mt19937_64 rng(97);
    Budget t = bud(6, 6);
    for (int it = 0; it < 10; ++it) {
        Basis b = it % 3 ? b1() : b2();
        TS f = TS::identity(b, t);
        f.add_term(Rat(2), 0, 0, CQ(-1));
        std::uniform_int_distribution<int> num(-4, 4), den(1, 3), le(0, 3);
        std::uniform_int_distribution<long> znum(2 * b.denom + 1, 5 * b.denom);
        for (int j = 0; j < 5; ++j)
            f.add_term(frac(znum(rng), b.denom), le(rng), 0, CQ(frac(num(rng), den(rng))));
        auto red = reduce_to_normal_form(f);
        TS lead = TS::monomial(CQ(-1), red.inv.alpha, int(red.inv.m), 0, b, t);
        Rat prev(-1);
        for (auto& s : red.steps) {
            if (s.kind != StepKind::first_block) {
                CHECK(s.gamma > prev);
                prev = s.gamma;
                // (10.18): [-z^alpha l^m, z^gamma R] = -z^beta T with T the removed part
                TS change = step_change(s, b, t) - TS::identity(b, t);
                TS bracket = lie_bracket(lead, change);
                Rat beta = s.gamma + red.inv.alpha - 1;
                for (auto& [k, c] : bracket.terms())
                    if (k.z != beta) CHECK(c == CQ(0));
            }
        }
    }
}

TEST_CASE("invariance under model-flow precomposition") {
    Budget t = bud(6, 7);
    TS f = ts("z - z^2 + 2*z^3*l^2 - z^4", b1(), t);
    auto red = reduce_to_normal_form(f);
    TS fc = formal_flow(model_field(red.inv, b1(), t), CQ(Rat(2, 3)));
    TS conj = compose_parabolic(compose_parabolic(invert_series(fc), f), fc);
    auto red2 = reduce_to_normal_form(conj);
    CHECK(red2.inv == red.inv);
}
