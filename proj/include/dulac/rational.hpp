#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dulac {

using Rat = mpq_class;

struct parse_error : std::runtime_error {
    std::size_t pos;
    parse_error(const std::string& msg, std::size_t at)
        : std::runtime_error(msg + " (at position " + std::to_string(at) + ")"), pos(at) {}
};

struct precondition_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct basis_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::string rat_str(const Rat& q) {
    std::string s = q.get_num().get_str();
    if (q.get_den() != 1) s += "/" + q.get_den().get_str();
    return s;
}

// mpq_class(n, d) does not canonicalize; every fraction built from parts
// must go through here.
inline Rat frac(long n, long d) {
    Rat q(n, d);
    q.canonicalize();
    return q;
}

// Accepts "p", "p/q" and decimal literals like "-0.25"; decimals are scaled
// integers, so the result is exact.
Rat rat_parse(const std::string& text);

inline double rat_d(const Rat& q) { return q.get_d(); }

// Exact complex rational coefficient.
struct CQ {
    Rat re, im;

    CQ() : re(0), im(0) {}
    CQ(long r) : re(r), im(0) {}
    CQ(const Rat& r) : re(r), im(0) {}
    CQ(Rat r, Rat i) : re(std::move(r)), im(std::move(i)) {}

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_real() const { return im == 0; }

    CQ operator-() const { return CQ(-re, -im); }
    CQ& operator+=(const CQ& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    CQ& operator-=(const CQ& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    friend CQ operator+(CQ a, const CQ& b) { return a += b; }
    friend CQ operator-(CQ a, const CQ& b) { return a -= b; }
    friend CQ operator*(const CQ& a, const CQ& b) {
        return CQ(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
    }
    CQ& operator*=(const CQ& o) { return *this = *this * o; }
    CQ inverse() const {
        Rat n = re * re + im * im;
        if (n == 0) throw precondition_error("division by zero coefficient");
        return CQ(re / n, -im / n);
    }
    friend CQ operator/(const CQ& a, const CQ& b) { return a * b.inverse(); }
    friend bool operator==(const CQ& a, const CQ& b) { return a.re == b.re && a.im == b.im; }
    friend bool operator!=(const CQ& a, const CQ& b) { return !(a == b); }

    CQ conj() const { return CQ(re, -im); }
    std::complex<double> to_complex() const { return {re.get_d(), im.get_d()}; }
};

std::string cq_str(const CQ& c);

// Coefficient traits shared by the exact layer (CQ) and the numeric layer
// (std::complex<double>, used by chart rescalings).
template <class C>
struct coeff;

template <>
struct coeff<CQ> {
    static constexpr bool exact = true;
    static CQ zero() { return CQ(); }
    static CQ one() { return CQ(1); }
    static CQ from_rat(const Rat& q) { return CQ(q); }
    static CQ from_long(long v) { return CQ(v); }
    static bool is_zero(const CQ& c) { return c.is_zero(); }
    static double mag(const CQ& c) { return std::abs(c.re.get_d()) + std::abs(c.im.get_d()); }
    static CQ inv(const CQ& c) { return c.inverse(); }
    static std::complex<double> approx(const CQ& c) { return c.to_complex(); }
};

template <>
struct coeff<std::complex<double>> {
    static constexpr bool exact = false;
    using C = std::complex<double>;
    static C zero() { return {0.0, 0.0}; }
    static C one() { return {1.0, 0.0}; }
    static C from_rat(const Rat& q) { return {q.get_d(), 0.0}; }
    static C from_long(long v) { return {double(v), 0.0}; }
    static bool is_zero(const C& c) { return c == C(0.0, 0.0); }
    static double mag(const C& c) { return std::abs(c.real()) + std::abs(c.imag()); }
    static C inv(const C& c) { return C(1.0, 0.0) / c; }
    static std::complex<double> approx(const C& c) { return c; }
};

}  // namespace dulac
