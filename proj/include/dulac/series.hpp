#pragma once

// Power-logarithmic transseries in z, l = -1/log z and l2 = -1/log l, with
// exact (or numeric) coefficients, truncated to an explicit budget.
//
// A series is a well-ordered finite sum of monomials  c * z^q * l^k * l2^n,
// q rational in the declared exponent lattice, k and n integers.  Monomials
// are ordered lexicographically by (q, k, n); the leading monomial is the
// asymptotically dominant one as z -> 0.

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "dulac/rational.hpp"

namespace dulac {

// Finitely generated exponent lattice: non-negative integer combinations of
// the generators plus integer offsets.  With integer offsets allowed, the
// reachable values are exactly the rationals whose denominator divides the
// lcm of the generator denominators, which is what we store.
struct Basis {
    std::vector<Rat> gens;
    long denom = 1;

    static Basis integers() { return Basis{{Rat(1)}, 1}; }

    static Basis from_generators(std::vector<Rat> g) {
        Basis b;
        b.gens = std::move(g);
        mpz_class l = 1;
        for (auto& q : b.gens) {
            if (q <= 0) throw basis_error("exponent generators must be positive");
            q.canonicalize();
            mpz_class d = q.get_den();
            l = l / gcd(l, d) * d;
        }
        if (l.fits_slong_p() == 0) throw basis_error("generator lattice too fine");
        b.denom = l.get_si();
        return b;
    }

    bool contains(const Rat& q) const {
        Rat scaled = q * denom;
        scaled.canonicalize();
        return scaled.get_den() == 1;
    }

    bool compatible(const Basis& o) const { return denom % o.denom == 0 || o.denom % denom == 0; }

    Basis merged(const Basis& o) const {
        if (!compatible(o)) throw basis_error("incompatible generator bases");
        return denom >= o.denom ? *this : o;
    }
};

struct Budget {
    Rat z_order;
    int l_depth = 8;

    Budget() : z_order(10) {}
    Budget(Rat zo, int ld) : z_order(std::move(zo)), l_depth(ld) {}

    Budget min(const Budget& o) const {
        return Budget(z_order < o.z_order ? z_order : o.z_order, std::min(l_depth, o.l_depth));
    }
};

struct MonKey {
    Rat z;
    int l = 0;
    int l2 = 0;

    friend bool operator<(const MonKey& a, const MonKey& b) {
        if (a.z != b.z) return a.z < b.z;
        if (a.l != b.l) return a.l < b.l;
        return a.l2 < b.l2;
    }
    friend bool operator==(const MonKey& a, const MonKey& b) {
        return a.z == b.z && a.l == b.l && a.l2 == b.l2;
    }
};

// Laurent polynomial in l (with optional l2 part): one z-block of a series.
template <class C>
using Block = std::map<std::pair<int, int>, C>;

template <class C>
class Series {
  public:
    using coeff_t = C;
    using map_t = std::map<MonKey, C>;

    Series() : basis_(Basis::integers()), bud_() {}
    Series(Basis b, Budget t) : basis_(std::move(b)), bud_(std::move(t)) {}

    static Series zero(const Basis& b, const Budget& t) { return Series(b, t); }

    static Series monomial(C c, const Rat& zexp, int lexp, int l2exp, const Basis& b,
                           const Budget& t) {
        Series s(b, t);
        s.add_term(zexp, lexp, l2exp, std::move(c));
        return s;
    }

    static Series constant(C c, const Basis& b, const Budget& t) {
        return monomial(std::move(c), Rat(0), 0, 0, b, t);
    }

    // The identity series z.
    static Series identity(const Basis& b, const Budget& t) {
        return monomial(coeff<C>::one(), Rat(1), 0, 0, b, t);
    }

    const Basis& basis() const { return basis_; }
    const Budget& budget() const { return bud_; }
    bool clipped() const { return clipped_; }
    void mark_clipped() { clipped_ = true; }
    bool is_zero() const { return t_.empty(); }
    std::size_t size() const { return t_.size(); }
    const map_t& terms() const { return t_; }

    void add_term(const Rat& zexp, int lexp, int l2exp, C c) {
        if (coeff<C>::is_zero(c)) return;
        if (!basis_.contains(zexp))
            throw basis_error("z-exponent " + rat_str(zexp) + " outside declared basis");
        if (zexp > bud_.z_order || lexp > bud_.l_depth) {
            clipped_ = true;
            return;
        }
        MonKey k{zexp, lexp, l2exp};
        auto it = t_.find(k);
        if (it == t_.end()) {
            t_.emplace(std::move(k), std::move(c));
        } else {
            it->second += c;
            if (coeff<C>::is_zero(it->second)) t_.erase(it);
        }
    }

    const MonKey& leading_key() const {
        if (t_.empty()) throw precondition_error("leading term of zero transseries");
        return t_.begin()->first;
    }
    const C& leading_coeff() const {
        if (t_.empty()) throw precondition_error("leading term of zero transseries");
        return t_.begin()->second;
    }

    C coeff_at(const Rat& zexp, int lexp, int l2exp = 0) const {
        auto it = t_.find(MonKey{zexp, lexp, l2exp});
        return it == t_.end() ? coeff<C>::zero() : it->second;
    }

    // All z-exponents present, increasing.
    std::vector<Rat> block_exponents() const {
        std::vector<Rat> out;
        for (auto& [k, c] : t_)
            if (out.empty() || out.back() != k.z) out.push_back(k.z);
        return out;
    }

    Block<C> block(const Rat& zexp) const {
        Block<C> out;
        for (auto it = t_.lower_bound(MonKey{zexp, INT32_MIN, INT32_MIN});
             it != t_.end() && it->first.z == zexp; ++it)
            out[{it->first.l, it->first.l2}] = it->second;
        return out;
    }

    Series with_budget(const Budget& t) const {
        Series out(basis_, t);
        out.clipped_ = clipped_;
        for (auto& [k, c] : t_) out.add_term(k.z, k.l, k.l2, c);
        return out;
    }

    // Drop numerically negligible coefficients (numeric instantiation only).
    void prune(double eps) {
        for (auto it = t_.begin(); it != t_.end();)
            it = coeff<C>::mag(it->second) <= eps ? t_.erase(it) : std::next(it);
    }

    Series operator-() const {
        Series out(basis_, bud_);
        out.clipped_ = clipped_;
        for (auto& [k, c] : t_) out.t_.emplace(k, -c);
        return out;
    }

    friend Series operator+(const Series& a, const Series& b) {
        Basis bs = a.basis_.merged(b.basis_);
        Series out(bs, a.bud_.min(b.bud_));
        out.clipped_ = a.clipped_ || b.clipped_;
        for (auto& [k, c] : a.t_) out.add_term(k.z, k.l, k.l2, c);
        for (auto& [k, c] : b.t_) out.add_term(k.z, k.l, k.l2, c);
        return out;
    }
    friend Series operator-(const Series& a, const Series& b) { return a + (-b); }

    friend Series operator*(const Series& a, const Series& b) {
        Basis bs = a.basis_.merged(b.basis_);
        Budget t = a.bud_.min(b.bud_);
        Series out(bs, t);
        out.clipped_ = a.clipped_ || b.clipped_;
        for (auto& [ka, ca] : a.t_) {
            if (ka.z > t.z_order) break;
            for (auto& [kb, cb] : b.t_) {
                Rat zez = ka.z + kb.z;
                if (zez > t.z_order) {
                    out.clipped_ = true;
                    break;  // kb.z increases within the map
                }
                out.add_term(zez, ka.l + kb.l, ka.l2 + kb.l2, ca * cb);
            }
        }
        return out;
    }

    Series scaled(const C& c) const {
        Series out(basis_, bud_);
        out.clipped_ = clipped_;
        if (coeff<C>::is_zero(c)) return out;
        for (auto& [k, v] : t_) out.add_term(k.z, k.l, k.l2, v * c);
        return out;
    }

    // Exact multiplication by a single monomial (exponent shift).
    Series shifted(const C& c, const Rat& dz, int dl, int dl2) const {
        Series out(basis_, bud_);
        out.clipped_ = clipped_;
        for (auto& [k, v] : t_) out.add_term(k.z + dz, k.l + dl, k.l2 + dl2, v * c);
        return out;
    }

    friend bool operator==(const Series& a, const Series& b) { return a.t_ == b.t_; }

  private:
    Basis basis_;
    Budget bud_;
    bool clipped_ = false;
    map_t t_;
};

template <class C>
Series<C> from_block(const Block<C>& blk, const Rat& zexp, const Basis& b, const Budget& t) {
    Series<C> out(b, t);
    for (auto& [le, c] : blk) out.add_term(zexp, le.first, le.second, c);
    return out;
}

// ---------------------------------------------------------------------------
// Calculus

// Termwise d/dz, using d/dz = (l^2/z) d/dl and d(l2)/dl = l2^2/l:
//   d/dz (z^q l^k l2^n) = z^{q-1} (q l^k l2^n + k l^{k+1} l2^n + n l^{k+1} l2^{n+1}).
template <class C>
Series<C> derive_z(const Series<C>& a) {
    Series<C> out(a.basis(), a.budget());
    if (a.clipped()) out.mark_clipped();
    for (auto& [k, c] : a.terms()) {
        if (k.z != 0) out.add_term(k.z - 1, k.l, k.l2, c * coeff<C>::from_rat(k.z));
        if (k.l != 0) out.add_term(k.z - 1, k.l + 1, k.l2, c * coeff<C>::from_long(k.l));
        if (k.l2 != 0) out.add_term(k.z - 1, k.l + 1, k.l2 + 1, c * coeff<C>::from_long(k.l2));
    }
    return out;
}

// Formal antiderivative with integration constant 0.  For q != -1 the
// recursion
//   int z^q l^k l2^n dz = z^{q+1} l^k l2^n/(q+1)
//                         - (k int z^q l^{k+1} l2^n + n int z^q l^{k+1} l2^{n+1}) / (q+1)
// settles within l_depth; at q = -1 (and l2-free input) the closed forms
//   int z^-1 dz = -l^-1,  int l z^-1 dz = -l2^-1,  int l^k z^-1 dz = l^{k-1}/(k-1)
// apply.  l2-carrying monomials at q = -1 are rejected.
template <class C>
void integrate_monomial(Series<C>& acc, const Rat& q, int k, int n, const C& c) {
    if (q == -1) {
        if (n != 0)
            throw precondition_error("integrate_z: l2-monomial at z-exponent -1 not supported");
        if (k == 0)
            acc.add_term(Rat(0), -1, 0, -c);
        else if (k == 1)
            acc.add_term(Rat(0), 0, -1, -c);
        else
            acc.add_term(Rat(0), k - 1, 0, c / coeff<C>::from_long(k - 1));
        return;
    }
    C inv_q1 = coeff<C>::inv(coeff<C>::from_rat(q + 1));
    C lead = c * inv_q1;
    acc.add_term(q + 1, k, n, lead);
    if (q + 1 > acc.budget().z_order || k + 1 > acc.budget().l_depth) {
        if (k != 0 || n != 0) acc.mark_clipped();
        return;
    }
    if (k != 0) integrate_monomial(acc, q, k + 1, n, -(lead * coeff<C>::from_long(k)));
    if (n != 0) integrate_monomial(acc, q, k + 1, n + 1, -(lead * coeff<C>::from_long(n)));
}

template <class C>
Series<C> integrate_z(const Series<C>& a) {
    Series<C> out(a.basis(), a.budget());
    if (a.clipped()) out.mark_clipped();
    for (auto& [k, c] : a.terms()) {
        if (k.l > a.budget().l_depth) {
            out.mark_clipped();
            continue;
        }
        integrate_monomial(out, k.z, k.l, k.l2, c);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Multiplicative inverse 1/t for t with invertible leading monomial.

template <class C>
Series<C> reciprocal(const Series<C>& t) {
    if (t.is_zero()) throw precondition_error("reciprocal of zero transseries");
    const MonKey& lk = t.leading_key();
    C lc = t.leading_coeff();
    // t = lc * mu * (1 + v), v infinitesimal; the final shift by mu^{-1} can
    // lower exponents, so the geometric series is run in a widened budget.
    Budget work(t.budget().z_order + (lk.z > 0 ? lk.z : Rat(0)),
                t.budget().l_depth + std::max(0, lk.l));
    Series<C> v = t.with_budget(work).shifted(coeff<C>::inv(lc), -lk.z, -lk.l, -lk.l2);
    Series<C> one = Series<C>::constant(coeff<C>::one(), t.basis(), work);
    Series<C> nv = one - v;  // -(v - 1)
    Series<C> acc = one;
    Series<C> pw = one;
    long guard = 0;
    while (true) {
        pw = pw * nv;
        if (pw.is_zero()) break;
        if (++guard > 100000) throw precondition_error("reciprocal: geometric series did not settle");
        acc = acc + pw;
    }
    if (t.clipped()) acc.mark_clipped();
    return acc.shifted(coeff<C>::inv(lc), -lk.z, -lk.l, -lk.l2).with_budget(t.budget());
}

template <class C>
Series<C> divide(const Series<C>& a, const Series<C>& b) {
    return a * reciprocal(b);
}

// ---------------------------------------------------------------------------
// Composition f o g for parabolic g = z + o(z), by the Taylor operator
//   f o g = sum_k  f^(k) (g - z)^k / k!.
// A sound iteration cap is derived from the budget: every monomial of
// u = (g - z)/z is infinitesimal, so k factors of u either raise the
// z-exponent by at least 1/denom or the l-exponent by at least 1.

namespace detail {

template <class C>
long compose_cap(const Series<C>& f, const Series<C>& u, const Budget& bud) {
    if (u.is_zero()) return 0;
    long denom = u.basis().denom;
    int lmin_u = 0;
    for (auto& [k, c] : u.terms()) lmin_u = std::min(lmin_u, k.l);
    int lmin_f = 0;
    for (auto& [k, c] : f.terms()) lmin_f = std::min(lmin_f, k.l);
    Rat zspan = bud.z_order - (f.is_zero() ? Rat(0) : f.leading_key().z);
    long P = std::max(0L, long(zspan.get_d() * double(denom)) + 2);
    long cap = P + (bud.l_depth - lmin_f + 1) + P * long(std::abs(lmin_u)) + 4;
    return std::max(cap, 4L);
}

}  // namespace detail

template <class C>
Series<C> compose_parabolic(const Series<C>& f, const Series<C>& g) {
    Budget bud = f.budget().min(g.budget());
    Basis bs = f.basis().merged(g.basis());
    if (g.is_zero()) throw precondition_error("compose: zero right factor");
    {
        const MonKey& lk = g.leading_key();
        if (!(lk.z == 1 && lk.l == 0 && lk.l2 == 0))
            throw precondition_error("compose: right factor is not parabolic");
        if (g.leading_coeff() != coeff<C>::one())
            throw precondition_error(
                "compose: homothety factor c != 1 is not supported in the exact layer");
    }
    Series<C> u = g - Series<C>::identity(bs, bud);  // g - z
    if (u.is_zero()) return f.with_budget(bud);
    // ord(u) > (1,0) lexicographically.
    {
        const MonKey& uk = u.leading_key();
        if (uk.z < 1 || (uk.z == 1 && uk.l <= 0))
            throw precondition_error("compose: right factor is not parabolic");
    }
    Series<C> uscaled = u.shifted(coeff<C>::one(), Rat(-1), 0, 0);  // u/z for the cap bound
    long cap = detail::compose_cap(f, uscaled, bud);

    // f^(k) reaches z-order ord_z(f) - k, so powers of u beyond the result
    // budget can still contribute; likewise negative l-exponents in u pull
    // high l-terms of f^(k) back into range.  Work in widened budgets.
    Rat zf_min = f.is_zero() ? Rat(0) : f.leading_key().z;
    int lf_min = 0, lmin_u = 0;
    for (auto& [k, c] : f.terms()) lf_min = std::min(lf_min, k.l);
    for (auto& [k, c] : uscaled.terms()) lmin_u = std::min(lmin_u, k.l);
    Budget bud_pw(bud.z_order - (zf_min < 0 ? zf_min : Rat(0)) + cap,
                  bud.l_depth + std::max(0, -lf_min));
    Budget bud_der(bud.z_order, bud.l_depth + int(cap) * std::max(0, -lmin_u));

    Series<C> acc = f.with_budget(bud);
    Series<C> der = f.with_budget(bud_der);
    Series<C> pw = Series<C>::constant(coeff<C>::one(), bs, bud_pw);
    Series<C> u_pw = u.with_budget(bud_pw);
    Rat kfact(1);
    for (long k = 1; k <= cap; ++k) {
        der = derive_z(der);
        pw = pw * u_pw;
        kfact *= k;
        if (der.is_zero() || pw.is_zero()) break;
        acc = acc + (der * pw).scaled(coeff<C>::from_rat(Rat(1) / kfact));
    }
    return acc;
}

// Formal compositional inverse of a parabolic series, via the operator
// series: the inverse is the formal fixed point of  h = id + g o h  with
// g = id - f, produced by iterating the expansion until the correction's
// order exceeds the budget.
template <class C>
Series<C> invert_series(const Series<C>& f) {
    if (f.is_zero()) throw precondition_error("invert: zero transseries");
    {
        const MonKey& lk = f.leading_key();
        if (!(lk.z == 1 && lk.l == 0 && lk.l2 == 0) || f.leading_coeff() != coeff<C>::one())
            throw precondition_error("invert: series is not parabolic");
    }
    Series<C> id = Series<C>::identity(f.basis(), f.budget());
    Series<C> g = id - f;
    if (g.is_zero()) return id;
    Series<C> h = id;
    long guard = 0;
    while (true) {
        Series<C> next = id + compose_parabolic(g, h);
        if (next == h) break;
        h = std::move(next);
        if (++guard > 4000) throw precondition_error("invert: iteration did not settle");
    }
    if (f.clipped()) h.mark_clipped();
    return h;
}

// Exp(c X).id for the field X = xi d/dz with ord_z(xi) > 1:
//   sum_k c^k xi^[k] / k!,   xi^[0] = z,  xi^[k+1] = xi * d/dz xi^[k].
template <class C>
Series<C> formal_flow(const Series<C>& xi, const C& time) {
    if (xi.is_zero()) return Series<C>::identity(xi.basis(), xi.budget());
    if (xi.leading_key().z <= 1)
        throw precondition_error("formal_flow: vector field coefficient must have z-order > 1");
    const Budget& bud = xi.budget();
    Series<C> acc = Series<C>::identity(xi.basis(), bud);
    Series<C> it = acc;  // xi^[k]
    Rat kfact(1);
    C cpow = coeff<C>::one();
    long guard = 0;
    while (true) {
        it = xi * derive_z(it);
        if (it.is_zero()) break;
        kfact *= ++guard;
        cpow *= time;
        acc = acc + it.scaled(cpow * coeff<C>::inv(coeff<C>::from_rat(kfact)));
        if (it.leading_key().z > bud.z_order) break;
        if (guard > 100000) throw precondition_error("formal_flow: Lie series did not settle");
    }
    return acc;
}

template <class C>
std::pair<Rat, Block<C>> leading_block(const Series<C>& f) {
    if (f.is_zero()) throw precondition_error("leading_block of zero transseries");
    Rat z0 = f.leading_key().z;
    return {z0, f.block(z0)};
}

// Equality of all monomials retained by `bud` (the meaning of "equal up to
// budget" everywhere in the test-suite).
template <class C>
bool equal_up_to(const Series<C>& a, const Series<C>& b, const Budget& bud) {
    Series<C> d = (a - b).with_budget(bud);
    return d.is_zero();
}

template <class C>
Series<C> pow_int(const Series<C>& a, long n) {
    if (n < 0) return reciprocal(pow_int(a, -n));
    Series<C> out = Series<C>::constant(coeff<C>::one(), a.basis(), a.budget());
    Series<C> base = a;
    while (n > 0) {
        if (n & 1) out = out * base;
        base = base * base;
        n >>= 1;
    }
    return out;
}

using TS = Series<CQ>;
using NS = Series<std::complex<double>>;

}  // namespace dulac
