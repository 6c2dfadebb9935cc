#include "doctest.h"
#include "dulac/germ.hpp"
#include "helpers.hpp"

using namespace dulac;
using namespace dulac::testing;

TEST_CASE("parse: spec literals") {
    TS a = ts("z - z^2*l^1");
    CHECK(a.coeff_at(Rat(1), 0) == CQ(1));
    CHECK(a.coeff_at(Rat(2), 1) == CQ(-1));

    TS fF = ts("z - z^2*l^0 + 1/2*z^3*l^1");
    CHECK(fF.coeff_at(Rat(3), 1) == CQ(Rat(1, 2)));

    TS c = ts("z^-1*l^-1");
    CHECK(c.coeff_at(Rat(-1), -1) == CQ(1));
}

TEST_CASE("parse: decimals are exact and whitespace is free") {
    TS a = ts(" 0.25*z ^ 2 *l^ -3 ");
    CHECK(a.coeff_at(Rat(2), -3) == CQ(Rat(1, 4)));
}

TEST_CASE("parse: errors carry positions") {
    CHECK_THROWS_AS(ts("z + + z"), parse_error);
    CHECK_THROWS_AS(ts("z ^"), parse_error);
    CHECK_THROWS_AS(ts("q"), parse_error);
    CHECK_THROWS_AS(ts("z^1/2"), parse_error);  // outside integer basis
    CHECK_NOTHROW(ts("z^1/2", b2()));
}

TEST_CASE("serialize: spec examples") {
    CHECK(serialize(ts("z - z^2*l^1")) == "z - z^2*l^1");
    CHECK(serialize(TS::zero(b1(), bud())) == "0");
}

TEST_CASE("serialize/parse round trip on random series") {
    std::mt19937_64 rng(3);
    for (int it = 0; it < 40; ++it) {
        Basis b = it % 2 ? b2() : b1();
        Budget t = bud(8, 8);
        TS a = random_series(rng, b, t, 9, -2 * b.denom, 6 * b.denom, -3, 6);
        CHECK(parse_series(serialize(a), b, t) == a);
    }
}

TEST_CASE("serialize/parse round trip with complex coefficients") {
    Budget t = bud(4, 4);
    TS a = TS::zero(b1(), t);
    a.add_term(Rat(2), 1, 0, CQ(Rat(1, 2), Rat(-3, 4)));
    a.add_term(Rat(0), 0, -1, CQ(Rat(0), Rat(1)));
    CHECK(parse_series(serialize(a), b1(), t) == a);
}

TEST_CASE("germ file: series backend") {
    auto g = parse_germ_text(
        "name=simple\n"
        "backend=series\n"
        "alpha=2\n"
        "m=0\n"
        "a=1\n"
        "body=z - z^2\n");
    CHECK(g.a == 1);
    CHECK(g.alpha == 2);
    CHECK(g.m == 0);
    CHECK(g.expansion() == ts("z - z^2", g.basis, g.budget));
}

TEST_CASE("germ file: flow backend expands through the Lie series") {
    auto g = parse_germ_text(
        "name=flowgerm\n"
        "backend=flow\n"
        "alpha=2\n"
        "m=0\n"
        "a=-1\n"
        "z_order=5\n"
        "body=z^2 - z^3 + z^4 - z^5\n"
        "c=1\n");
    TS f = g.expansion();
    CHECK(f.coeff_at(Rat(1), 0) == CQ(1));
    CHECK(f.coeff_at(Rat(2), 0) == CQ(1));  // a = -1
}

TEST_CASE("germ file: alpha = 1 is rejected") {
    CHECK_THROWS_AS(parse_germ_text("name=x\nbackend=series\nalpha=1\nm=0\nbody=z - z^2\n"),
                    precondition_error);
}

TEST_CASE("germ file: leading-data mismatch is reported") {
    CHECK_THROWS_AS(parse_germ_text(
                        "name=x\nbackend=series\nalpha=2\nm=0\na=2\nbody=z - z^2\n"),
                    precondition_error);
    CHECK_THROWS_AS(parse_germ_text(
                        "name=x\nbackend=series\nalpha=3\nm=0\na=1\nbody=z - z^2\n"),
                    precondition_error);
}

TEST_CASE("germ file round trip") {
    auto g = parse_germ_text(
        "name=rt\nbackend=series\nalpha=2\nm=1\na=1\nbody=z - z^2*l^1 + z^3\nreal=true\n");
    auto g2 = parse_germ_text(serialize_germ(g));
    CHECK(g2.name == g.name);
    CHECK(g2.body == g.body);
    CHECK(g2.alpha == g.alpha);
}

TEST_CASE("expression backend: parse, eval, derivative") {
    auto g = parse_germ_text(
        "name=moebius\n"
        "backend=expression\n"
        "alpha=2\n"
        "m=0\n"
        "a=-1\n"
        "body=z/(1-z)\n");
    std::complex<double> zeta(3.0, 0.4);
    std::complex<double> z = std::exp(-zeta);
    auto got = eval_expr(g.expr, zeta);
    CHECK(std::abs(got - z / (1.0 - z)) < 1e-14);
    auto d = expr_derivative(g.expr);
    auto dgot = eval_expr(d, zeta);
    auto exact = 1.0 / ((1.0 - z) * (1.0 - z));
    CHECK(std::abs(dgot - exact) < 1e-12);
}
