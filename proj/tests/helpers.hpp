#pragma once

#include <random>

#include "dulac/parse.hpp"
#include "dulac/series.hpp"

namespace dulac::testing {

inline Basis b1() { return Basis::integers(); }
inline Basis b2() { return Basis::from_generators({Rat(1, 2)}); }

inline Budget bud(long zo = 8, int ld = 8) { return Budget(Rat(zo), ld); }

inline TS ts(const std::string& text, const Basis& b = b1(), const Budget& t = bud()) {
    return parse_series(text, b, t);
}

// Random real-rational transseries with z-exponents on the basis grid.
inline TS random_series(std::mt19937_64& rng, const Basis& b, const Budget& t, int terms,
                        long zmin_num, long zmax_num, int lmin, int lmax) {
    std::uniform_int_distribution<long> znum(zmin_num, zmax_num);
    std::uniform_int_distribution<int> le(lmin, lmax);
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    TS out = TS::zero(b, t);
    for (int i = 0; i < terms; ++i) {
        Rat q = frac(znum(rng), b.denom);
        out.add_term(q, le(rng), 0, CQ(frac(num(rng), den(rng))));
    }
    return out;
}

// Random parabolic series z + higher-order terms.
inline TS random_parabolic(std::mt19937_64& rng, const Basis& b, const Budget& t, int terms) {
    TS out = TS::identity(b, t);
    std::uniform_int_distribution<long> znum(b.denom + 1, 3 * b.denom);
    std::uniform_int_distribution<int> le(0, 3);
    std::uniform_int_distribution<int> num(-5, 5);
    std::uniform_int_distribution<int> den(1, 3);
    for (int i = 0; i < terms; ++i) {
        Rat q = frac(znum(rng), b.denom);
        out.add_term(q, le(rng), 0, CQ(frac(num(rng), den(rng))));
    }
    return out;
}

}  // namespace dulac::testing
