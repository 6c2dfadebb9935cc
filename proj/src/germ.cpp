#include "dulac/germ.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace dulac {

// ---------------------------------------------------------------------------
// Expression parser: precedence climbing over + - * / ^ with log/exp calls.

namespace {

struct ELexer {
    const std::string& s;
    std::size_t i = 0;
    explicit ELexer(const std::string& t) : s(t) { skip(); }
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
    bool accept_word(const char* w) {
        std::size_t n = std::strlen(w);
        if (s.compare(i, n, w) == 0) {
            char next = i + n < s.size() ? s[i + n] : '\0';
            if (!std::isalnum(static_cast<unsigned char>(next))) {
                i += n;
                skip();
                return true;
            }
        }
        return false;
    }
};

ExprPtr make(Expr::Op op, ExprPtr a = nullptr, ExprPtr b = nullptr) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

ExprPtr make_const(std::complex<double> v) {
    auto e = std::make_shared<Expr>();
    e->op = Expr::Op::Const;
    e->value = v;
    return e;
}

ExprPtr parse_sum(ELexer& lx);

ExprPtr parse_atom(ELexer& lx) {
    if (lx.accept('(')) {
        ExprPtr e = parse_sum(lx);
        lx.expect(')');
        return e;
    }
    if (lx.accept_word("log")) {
        lx.expect('(');
        ExprPtr e = parse_sum(lx);
        lx.expect(')');
        return make(Expr::Op::Log, e);
    }
    if (lx.accept_word("exp")) {
        lx.expect('(');
        ExprPtr e = parse_sum(lx);
        lx.expect(')');
        return make(Expr::Op::Exp, e);
    }
    if (lx.accept_word("l2")) return make(Expr::Op::L2);
    if (lx.accept_word("l")) return make(Expr::Op::L);
    if (lx.accept_word("z")) return make(Expr::Op::Z);
    // number
    std::size_t start = lx.i;
    while (lx.i < lx.s.size() &&
           (std::isdigit(static_cast<unsigned char>(lx.s[lx.i])) || lx.s[lx.i] == '.'))
        ++lx.i;
    if (lx.i == start) throw parse_error("expected expression atom", lx.i);
    std::string num = lx.s.substr(start, lx.i - start);
    lx.skip();
    return make_const(std::complex<double>(rat_parse(num).get_d(), 0.0));
}

ExprPtr parse_power(ELexer& lx) {
    ExprPtr base = parse_atom(lx);
    if (lx.accept('^')) {
        bool paren = lx.accept('(');
        bool neg = lx.accept('-');
        std::size_t start = lx.i;
        while (lx.i < lx.s.size() &&
               (std::isdigit(static_cast<unsigned char>(lx.s[lx.i])) || lx.s[lx.i] == '/'))
            ++lx.i;
        if (lx.i == start) throw parse_error("expected constant exponent", lx.i);
        Rat q = rat_parse(lx.s.substr(start, lx.i - start));
        lx.skip();
        if (paren) lx.expect(')');
        auto e = make(Expr::Op::Pow, base);
        auto m = std::const_pointer_cast<Expr>(e);
        m->exponent = neg ? Rat(-q) : q;
        return e;
    }
    return base;
}

ExprPtr parse_product(ELexer& lx) {
    ExprPtr e = parse_power(lx);
    while (true) {
        if (lx.accept('*'))
            e = make(Expr::Op::Mul, e, parse_power(lx));
        else if (lx.accept('/'))
            e = make(Expr::Op::Div, e, parse_power(lx));
        else
            break;
    }
    return e;
}

ExprPtr parse_sum(ELexer& lx) {
    ExprPtr e;
    if (lx.accept('-'))
        e = make(Expr::Op::Neg, parse_product(lx));
    else
        e = parse_product(lx);
    while (true) {
        if (lx.accept('+'))
            e = make(Expr::Op::Add, e, parse_product(lx));
        else if (lx.accept('-'))
            e = make(Expr::Op::Sub, e, parse_product(lx));
        else
            break;
    }
    return e;
}

}  // namespace

ExprPtr parse_expression(const std::string& text) {
    ELexer lx(text);
    ExprPtr e = parse_sum(lx);
    if (!lx.done()) throw parse_error("trailing input in expression", lx.i);
    return e;
}

std::complex<double> eval_expr(const ExprPtr& e, std::complex<double> zeta) {
    using C = std::complex<double>;
    switch (e->op) {
        case Expr::Op::Z:
            return std::exp(-zeta);
        case Expr::Op::L:
            return 1.0 / zeta;
        case Expr::Op::L2:
            return 1.0 / std::log(zeta);
        case Expr::Op::Const:
            return e->value;
        case Expr::Op::Add:
            return eval_expr(e->a, zeta) + eval_expr(e->b, zeta);
        case Expr::Op::Sub:
            return eval_expr(e->a, zeta) - eval_expr(e->b, zeta);
        case Expr::Op::Mul:
            return eval_expr(e->a, zeta) * eval_expr(e->b, zeta);
        case Expr::Op::Div:
            return eval_expr(e->a, zeta) / eval_expr(e->b, zeta);
        case Expr::Op::Neg:
            return -eval_expr(e->a, zeta);
        case Expr::Op::Pow: {
            double q = e->exponent.get_d();
            if (e->a->op == Expr::Op::Z) return std::exp(-q * zeta);  // surface-exact
            C base = eval_expr(e->a, zeta);
            return std::pow(base, q);
        }
        case Expr::Op::Log:
            return std::log(eval_expr(e->a, zeta));
        case Expr::Op::Exp:
            return std::exp(eval_expr(e->a, zeta));
    }
    return {0.0, 0.0};
}

ExprPtr expr_derivative(const ExprPtr& e) {
    using Op = Expr::Op;
    switch (e->op) {
        case Op::Z:
            return make_const({1.0, 0.0});
        case Op::L: {
            // dl/dz = l^2 / z
            auto l = make(Op::L);
            return make(Op::Div, make(Op::Mul, l, l), make(Op::Z));
        }
        case Op::L2: {
            // dl2/dz = l * l2^2 / z
            auto l2 = make(Op::L2);
            return make(Op::Div, make(Op::Mul, make(Op::L), make(Op::Mul, l2, l2)), make(Op::Z));
        }
        case Op::Const:
            return make_const({0.0, 0.0});
        case Op::Add:
            return make(Op::Add, expr_derivative(e->a), expr_derivative(e->b));
        case Op::Sub:
            return make(Op::Sub, expr_derivative(e->a), expr_derivative(e->b));
        case Op::Mul:
            return make(Op::Add, make(Op::Mul, expr_derivative(e->a), e->b),
                        make(Op::Mul, e->a, expr_derivative(e->b)));
        case Op::Div: {
            auto num = make(Op::Sub, make(Op::Mul, expr_derivative(e->a), e->b),
                            make(Op::Mul, e->a, expr_derivative(e->b)));
            return make(Op::Div, num, make(Op::Mul, e->b, e->b));
        }
        case Op::Neg:
            return make(Op::Neg, expr_derivative(e->a));
        case Op::Pow: {
            // q * a^(q-1) * a'
            auto down = make(Op::Pow, e->a);
            std::const_pointer_cast<Expr>(down)->exponent = e->exponent - 1;
            auto scaled = make(Op::Mul, make_const({e->exponent.get_d(), 0.0}), down);
            return make(Op::Mul, scaled, expr_derivative(e->a));
        }
        case Op::Log:
            return make(Op::Div, expr_derivative(e->a), e->a);
        case Op::Exp:
            return make(Op::Mul, e, expr_derivative(e->a));
    }
    return make_const({0.0, 0.0});
}

// ---------------------------------------------------------------------------

TS GermDefinition::expansion() const {
    switch (backend) {
        case Backend::series:
            return body;
        case Backend::flow:
            return formal_flow(body, CQ(flow_time));
        case Backend::expression:
            throw precondition_error("expression backend has no formal expansion");
    }
    return body;
}

namespace {

std::map<std::string, std::string> read_kv(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        std::size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        std::size_t e = line.find_last_not_of(" \t\r");
        line = line.substr(b, e - b + 1);
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error(origin + ": missing '=' in germ file", lineno);
        std::string key = line.substr(0, eq);
        std::string val = line.substr(eq + 1);
        while (!key.empty() && std::isspace(static_cast<unsigned char>(key.back()))) key.pop_back();
        std::size_t vb = val.find_first_not_of(" \t");
        val = vb == std::string::npos ? "" : val.substr(vb);
        if (kv.count(key)) throw parse_error(origin + ": duplicate key '" + key + "'", lineno);
        kv[key] = val;
    }
    return kv;
}

}  // namespace

GermDefinition parse_germ_text(const std::string& text, const std::string& origin) {
    auto kv = read_kv(text, origin);
    auto need = [&](const std::string& k) -> std::string {
        auto it = kv.find(k);
        if (it == kv.end()) throw precondition_error(origin + ": missing key '" + k + "'");
        return it->second;
    };
    auto get = [&](const std::string& k, const std::string& dflt) {
        auto it = kv.find(k);
        return it == kv.end() ? dflt : it->second;
    };

    GermDefinition g;
    g.name = get("name", "germ");
    std::string bk = need("backend");
    if (bk == "series")
        g.backend = Backend::series;
    else if (bk == "flow")
        g.backend = Backend::flow;
    else if (bk == "expression")
        g.backend = Backend::expression;
    else
        throw precondition_error(origin + ": unknown backend '" + bk + "'");

    {
        std::vector<Rat> gens;
        std::istringstream gs(get("generators", "1"));
        std::string tok;
        while (std::getline(gs, tok, ',')) gens.push_back(rat_parse(tok));
        g.basis = Basis::from_generators(gens);
    }
    g.budget = Budget(rat_parse(get("z_order", "10")), std::stoi(get("l_depth", "8")));
    g.alpha = rat_parse(need("alpha"));
    if (!(g.alpha > 1)) throw precondition_error(origin + ": alpha must be > 1 (parabolic)");
    if (!g.basis.contains(g.alpha))
        throw basis_error(origin + ": alpha outside declared generator basis");
    g.m = std::stol(need("m"));
    g.a = rat_parse(get("a", "1"));
    g.dom_C = std::stod(get("C", "0.5"));
    g.dom_R = std::stod(get("R", "2.0"));
    if (g.dom_C < 0 || g.dom_R <= 0)
        throw precondition_error(origin + ": need C >= 0 and R > 0");
    g.real_coefficients = get("real", "true") == "true";

    std::string body = need("body");
    if (g.backend == Backend::expression) {
        g.expr = parse_expression(body);
        g.expr_text = body;
    } else {
        g.body = parse_series(body, g.basis, g.budget);
    }
    if (g.backend == Backend::flow) g.flow_time = rat_parse(get("c", "1"));

    validate_leading(g);
    return g;
}

GermDefinition parse_germ_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw precondition_error("cannot open germ file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_germ_text(buf.str(), path);
}

std::string serialize_germ(const GermDefinition& g) {
    std::ostringstream out;
    out << "name=" << g.name << "\n";
    out << "backend="
        << (g.backend == Backend::series ? "series"
                                         : g.backend == Backend::flow ? "flow" : "expression")
        << "\n";
    out << "generators=";
    for (std::size_t i = 0; i < g.basis.gens.size(); ++i)
        out << (i ? "," : "") << rat_str(g.basis.gens[i]);
    out << "\n";
    out << "alpha=" << rat_str(g.alpha) << "\n";
    out << "m=" << g.m << "\n";
    out << "a=" << rat_str(g.a) << "\n";
    if (g.backend == Backend::expression)
        out << "body=" << g.expr_text << "\n";
    else
        out << "body=" << serialize(g.body) << "\n";
    if (g.backend == Backend::flow) out << "c=" << rat_str(g.flow_time) << "\n";
    out << "C=" << g.dom_C << "\n";
    out << "R=" << g.dom_R << "\n";
    out << "real=" << (g.real_coefficients ? "true" : "false") << "\n";
    out << "z_order=" << rat_str(g.budget.z_order) << "\n";
    out << "l_depth=" << g.budget.l_depth << "\n";
    return out.str();
}

void validate_leading(const GermDefinition& g) {
    if (g.backend == Backend::expression) {
        // Numeric check along the positive axis: the ratio
        // |f(z) - z + a z^alpha l^m| / |z^alpha l^{m+1}| must stay bounded.
        double worst = 0;
        for (double zeta : {6.0, 8.0, 10.0, 12.0}) {
            std::complex<double> zc(zeta, 0.0);
            std::complex<double> z = std::exp(-zc);
            std::complex<double> fz = eval_expr(g.expr, zc);
            std::complex<double> lead =
                std::complex<double>(g.a.get_d(), 0.0) * std::exp(-g.alpha.get_d() * zc) *
                std::pow(zc, double(-g.m));
            double denom = std::abs(std::exp(-g.alpha.get_d() * zc)) * std::pow(zeta, -(g.m + 1.0));
            double ratio = std::abs(fz - z + lead) / denom;
            worst = std::max(worst, ratio);
        }
        if (!(worst < 1e6))
            throw precondition_error(g.name + ": expression leading data mismatch (ratio " +
                                     std::to_string(worst) + ")");
        return;
    }
    TS f = g.expansion();
    if (f.is_zero() || !(f.leading_key() == MonKey{Rat(1), 0, 0}) ||
        f.leading_coeff() != CQ(1))
        throw precondition_error(g.name + ": expansion does not start with z");
    auto blocks = f.block_exponents();
    if (blocks.size() < 2) {
        throw precondition_error(g.name + ": expansion has no z^alpha block within budget");
    }
    if (f.block(Rat(1)).size() != 1)
        throw precondition_error(g.name + ": unexpected logarithmic terms at z-order 1");
    const Rat& a2 = blocks[1];
    if (a2 != g.alpha)
        throw precondition_error(g.name + ": first correction block is z^" + rat_str(a2) +
                                 ", declared alpha=" + rat_str(g.alpha));
    auto blk = f.block(g.alpha);
    auto lead = blk.begin();  // lowest l-exponent
    if (lead->first.second != 0)
        throw precondition_error(g.name + ": z^alpha block carries l2 terms");
    if (lead->first.first != g.m)
        throw precondition_error(g.name + ": leading l-power is " +
                                 std::to_string(lead->first.first) + ", declared m=" +
                                 std::to_string(g.m));
    if (lead->second != CQ(-g.a))
        throw precondition_error(g.name + ": leading coefficient is " + cq_str(lead->second) +
                                 ", declared -a=" + rat_str(-g.a));
}

}  // namespace dulac
