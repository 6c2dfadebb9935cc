#include "dulac/parse.hpp"

#include <cctype>

namespace dulac {

Rat rat_parse(const std::string& text) {
    std::string s;
    for (char c : text)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    if (s.empty()) throw parse_error("empty number", 0);
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        Rat q(s, 10);
        q.canonicalize();
        return q;
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rat(s, 10);
    // decimal: scale by a power of ten
    std::string digits = s.substr(0, dot) + s.substr(dot + 1);
    std::size_t frac = s.size() - dot - 1;
    if (digits.empty() || digits == "-" || digits == "+") throw parse_error("bad decimal", 0);
    Rat q(mpz_class(digits, 10), mpz_class(1));
    for (std::size_t i = 0; i < frac; ++i) q /= 10;
    q.canonicalize();
    return q;
}

std::string cq_str(const CQ& c) {
    if (c.im == 0) return rat_str(c.re);
    std::string s = "(" + rat_str(c.re);
    s += (c.im > 0) ? "+" : "-";
    Rat a = abs(c.im);
    s += rat_str(a) + "i)";
    return s;
}

namespace {

struct Lexer {
    const std::string& s;
    std::size_t i = 0;

    explicit Lexer(const std::string& text) : s(text) { skip(); }

    void skip() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool done() const { return i >= s.size(); }
    char peek() const { return i < s.size() ? s[i] : '\0'; }
    bool accept(char c) {
        if (peek() == c) {
            ++i;
            skip();
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) throw parse_error(std::string("expected '") + c + "'", i);
    }

    bool number_ahead() const {
        char c = peek();
        return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
    }

    Rat number() {
        std::size_t start = i;
        bool neg = accept('-');
        if (!neg) accept('+');
        std::size_t digits_at = i;
        while (i < s.size() && (std::isdigit(static_cast<unsigned char>(s[i])) || s[i] == '.')) ++i;
        if (i == digits_at) throw parse_error("expected number", i);
        std::string body = s.substr(digits_at, i - digits_at);
        skip();
        if (accept('/')) {
            std::size_t den_at = i;
            while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
            if (i == den_at) throw parse_error("expected denominator", i);
            body += "/" + s.substr(den_at, i - den_at);
            skip();
        }
        try {
            Rat q = rat_parse(body);
            return neg ? Rat(-q) : q;
        } catch (const std::exception&) {
            throw parse_error("bad number '" + body + "'", start);
        }
    }

    Rat exponent() {
        if (accept('(')) {
            Rat q = number();
            expect(')');
            return q;
        }
        return number();
    }
};

struct Mono {
    CQ c{1};
    Rat z{0};
    long l = 0, l2 = 0;
};

// factor := coeff | var [^ exp]
void parse_factor(Lexer& lx, Mono& m) {
    if (lx.peek() == 'z') {
        ++lx.i;
        lx.skip();
        m.z += lx.accept('^') ? lx.exponent() : Rat(1);
        return;
    }
    if (lx.peek() == 'l') {
        ++lx.i;
        bool is_l2 = (lx.peek() == '2');
        if (is_l2) ++lx.i;
        lx.skip();
        Rat e = lx.accept('^') ? lx.exponent() : Rat(1);
        if (e.get_den() != 1) throw parse_error("logarithm exponents must be integers", lx.i);
        (is_l2 ? m.l2 : m.l) += e.get_num().get_si();
        return;
    }
    if (lx.peek() == '(') {  // complex coefficient literal
        lx.expect('(');
        Rat re = lx.number();
        Rat im(0);
        if (lx.peek() == '+' || lx.peek() == '-') {
            im = lx.number();
            if (!lx.accept('i')) throw parse_error("expected 'i' in complex literal", lx.i);
        }
        lx.expect(')');
        m.c *= CQ(re, im);
        return;
    }
    if (lx.number_ahead()) {
        m.c *= CQ(lx.number());
        return;
    }
    throw parse_error("expected coefficient or variable", lx.i);
}

}  // namespace

TS parse_series(const std::string& text, const Basis& basis, const Budget& budget) {
    Lexer lx(text);
    TS out = TS::zero(basis, budget);
    if (lx.done()) throw parse_error("empty transseries", 0);
    if (lx.s.find_first_not_of(" \t\r\n0") == std::string::npos) return out;  // "0"
    bool first = true;
    while (!lx.done()) {
        int sign = 1;
        if (lx.accept('-'))
            sign = -1;
        else if (lx.accept('+'))
            sign = 1;
        else if (!first)
            throw parse_error("expected '+' or '-' between terms", lx.i);
        first = false;
        Mono m;
        parse_factor(lx, m);
        while (lx.accept('*')) parse_factor(lx, m);
        if (m.l < INT32_MIN || m.l > INT32_MAX || m.l2 < INT32_MIN || m.l2 > INT32_MAX)
            throw parse_error("logarithm exponent out of range", lx.i);
        if (!basis.contains(m.z))
            throw parse_error("z-exponent " + rat_str(m.z) + " outside declared basis", lx.i);
        if (sign < 0) m.c = -m.c;
        out.add_term(m.z, int(m.l), int(m.l2), m.c);
    }
    return out;
}

std::string monomial_str(const Rat& zexp, int lexp, int l2exp) {
    std::string s;
    auto app = [&](const std::string& part) {
        if (!s.empty()) s += "*";
        s += part;
    };
    if (zexp != 0) {
        if (zexp == 1)
            app("z");
        else if (zexp.get_den() == 1)
            app("z^" + rat_str(zexp));
        else
            app("z^(" + rat_str(zexp) + ")");
    }
    if (lexp != 0) app("l^" + std::to_string(lexp));
    if (l2exp != 0) app("l2^" + std::to_string(l2exp));
    return s;
}

std::string serialize(const TS& s) {
    if (s.is_zero()) return "0";
    std::string out;
    for (auto& [k, c] : s.terms()) {
        CQ cc = c;
        bool neg = cc.is_real() && cc.re < 0;
        if (neg) cc = -cc;
        if (out.empty()) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        std::string mono = monomial_str(k.z, k.l, k.l2);
        bool unit = cc.is_real() && cc.re == 1;
        if (mono.empty())
            out += cq_str(cc);
        else if (unit)
            out += mono;
        else
            out += cq_str(cc) + "*" + mono;
    }
    return out;
}

}  // namespace dulac
