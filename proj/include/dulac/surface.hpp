#pragma once

// Numeric side: points of the Riemann surface of the logarithm in the chart
// zeta = -log z, standard quadratic domains, and germ evaluation backends.
// In this chart every power-log monomial is single valued:
//   z^q l^k l2^n  =  exp(-q zeta) * zeta^-k * (log zeta)^-n,
// with the principal log of zeta (zeta stays off the negative real axis on
// any standard quadratic domain).

#include <complex>
#include <functional>
#include <optional>

#include "dulac/germ.hpp"
#include "dulac/series.hpp"

namespace dulac {

using Cd = std::complex<double>;

struct numeric_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SurfacePoint {
    Cd zeta;     // -log z
    long level;  // k with Im(-zeta) in [(k-1)pi, (k+1)pi)

    Cd z() const { return std::exp(-zeta); }
    double abs_z() const { return std::exp(-zeta.real()); }
    double arg_z() const { return -zeta.imag(); }  // surface argument of z
};

inline SurfacePoint surface_point(Cd zeta) {
    return SurfacePoint{zeta, std::lround(-zeta.imag() / M_PI)};
}

// z = r e^{i phi} with the surface argument phi.
inline SurfacePoint surface_point_z(double r, double phi) {
    return surface_point(Cd(-std::log(r), -phi));
}

struct QuadraticDomain {
    double C = 0.5;
    double R = 2.0;

    // zeta in phi(C+ \ K(0,R)), phi(xi) = xi + C sqrt(xi+1): invert the map.
    bool contains(Cd zeta) const {
        Cd xi = invert_chart(zeta);
        return xi.real() > 0 && std::abs(xi) > R;
    }

    Cd invert_chart(Cd zeta) const {
        // xi + C sqrt(xi+1) = zeta; s = sqrt(xi+1) with Re s > 0:
        // s^2 + C s - (1 + zeta) = 0.
        Cd disc = std::sqrt(Cd(C * C, 0) + 4.0 * (1.0 + zeta));
        Cd s = (-C + disc) / 2.0;
        return s * s - 1.0;
    }

    // Smallest Re(zeta) on the domain boundary at a given Im(zeta); used for
    // sampling and for the level-radius profile  r(k) ~ exp(-D sqrt(k)).
    double min_re(double im) const;
};

// ---------------------------------------------------------------------------
// Series evaluation in the zeta chart.

Cd eval_series(const TS& s, Cd zeta);
Cd eval_series_dzeta(const TS& s, Cd zeta);  // d/dzeta of the sum

// Last-kept-term magnitude times a safety factor of 10 (tail heuristic, not
// a bound).
double series_tail_estimate(const TS& s, Cd zeta);

// ---------------------------------------------------------------------------

class NumericGerm {
  public:
    explicit NumericGerm(GermDefinition def, double tolerance = 1e-12);

    const GermDefinition& definition() const { return def_; }
    double tolerance() const { return tol_; }
    const QuadraticDomain& domain() const { return dom_; }

    double a() const { return def_.a.get_d(); }
    double alpha() const { return def_.alpha.get_d(); }
    long m() const { return def_.m; }

    SurfacePoint eval(const SurfacePoint& p) const { return step(p, +1); }
    SurfacePoint eval_inverse(const SurfacePoint& p) const { return step(p, -1); }

    // Formal expansion (series/flow backends only).
    const TS& expansion() const;

  private:
    SurfacePoint step(const SurfacePoint& p, int dir) const;
    Cd series_step(Cd zeta, const TS& u_series) const;
    Cd flow_step(Cd zeta, double time) const;
    Cd expr_step(Cd zeta) const;
    Cd expr_inverse_step(Cd zeta) const;

    GermDefinition def_;
    double tol_;
    QuadraticDomain dom_;
    mutable std::optional<TS> expansion_;
    TS u_fwd_;      // (f - z)/z as a series in the zeta chart (series backend)
    TS u_inv_;      // (f^{-1} - z)/z
    TS xi_over_z_;  // xi/z (flow backend)
};

}  // namespace dulac
