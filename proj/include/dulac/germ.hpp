#pragma once

// Germ definitions: a named germ with declared leading data (a, alpha, m),
// one of three evaluation backends, and standard-quadratic-domain parameters.

#include <complex>
#include <memory>
#include <optional>
#include <string>

#include "dulac/parse.hpp"
#include "dulac/series.hpp"

namespace dulac {

// ---------------------------------------------------------------------------
// Closed-form expression trees over {z, l, l2, +, -, *, /, ^const, log, exp}.

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Expr {
    enum class Op { Z, L, L2, Const, Add, Sub, Mul, Div, Neg, Pow, Log, Exp };
    Op op;
    std::complex<double> value{0.0, 0.0};  // Const
    Rat exponent{0};                       // Pow
    ExprPtr a, b;
};

ExprPtr parse_expression(const std::string& text);
ExprPtr expr_derivative(const ExprPtr& e);  // d/dz

// Evaluate at the surface point with logarithmic chart zeta = -log z.
// z^q is taken as exp(-q zeta) (single-valued on the surface); log means the
// principal branch applied to the subexpression value.
std::complex<double> eval_expr(const ExprPtr& e, std::complex<double> zeta);

// ---------------------------------------------------------------------------

enum class Backend { series, flow, expression };

struct GermDefinition {
    std::string name;
    Backend backend = Backend::series;

    TS body;        // series backend: the germ itself; flow backend: xi
    Rat flow_time;  // flow backend: c
    ExprPtr expr;   // expression backend
    std::string expr_text;

    Rat a{1};      // leading data: f = z - a z^alpha l^m + O(z^alpha l^{m+1})
    Rat alpha{2};
    long m = 0;

    double dom_C = 0.5;  // standard quadratic domain parameters
    double dom_R = 2.0;
    bool real_coefficients = true;

    Basis basis = Basis::integers();
    Budget budget;

    // Formal expansion (series and flow backends).
    TS expansion() const;
};

// Parse the key/value germ file format; validates the declared leading data
// against the backend (symbolically for series/flow, numerically for
// expression backends).
GermDefinition parse_germ_file(const std::string& path);
GermDefinition parse_germ_text(const std::string& text, const std::string& origin = "<string>");

std::string serialize_germ(const GermDefinition& g);

// Leading-data consistency check; throws precondition_error with the first
// inconsistent coefficient on mismatch.
void validate_leading(const GermDefinition& g);

}  // namespace dulac
