#pragma once

// Leau-Fatou petals on the Riemann surface of the logarithm, numeric Fatou
// coordinates by orbit sums, and their inversion.
//
// In the chart  w = (1/(a(alpha-1))) z^{1-alpha} l^{-m}  the germ acts as
// F(w) = w + 1 + o(1); the attracting petal of level j is the pullback of
//   { |w| > R0,  |Im log w + 2 pi j| < pi - arcsin(min(1, c/log|w|)) }.

#include <functional>
#include <vector>

#include "dulac/fatou.hpp"
#include "dulac/surface.hpp"

namespace dulac {

// log w on the surface: -log(a(alpha-1)) + (alpha-1) zeta + m Log zeta.
Cd w_chart_log(Cd zeta, double a, double alpha, double m);

Cd to_w_chart(const SurfacePoint& p, double a, double alpha, double m);

struct Petal {
    long j = 0;
    int sign = +1;  // +1 attracting, -1 repelling
    double a = 1, alpha = 2;
    double m = 0;
    double c_bound = 0.5;  // constant of |F(w) - (w+1)| <= c / log|w|
    double R0 = 12.0;      // minimum |w|
    QuadraticDomain dom;

    // Effective leading coefficient of the germ driving this petal
    // (the inverse germ, with -a, on the repelling side).
    double a_eff() const { return sign > 0 ? a : -a; }

    bool contains(const SurfacePoint& p) const;
    // Angular width of the petal at |w| = r (opening tends to 2 pi / (alpha-1)
    // in the z-chart as r -> infinity).
    double w_halfwidth(double abs_w) const;
};

struct UniformBoundReport {
    double c_est = 0;       // sup |f(z) - z + a z^alpha l^m| / |z^alpha l^{m+1}|
    double c_est_half = 0;  // same over half the samples (stability probe)
    bool pass = false;
};

UniformBoundReport verify_uniform_bound(const NumericGerm& g, int samples);

// Estimate of the w-chart translation constant sup |F(w)-(w+1)| log|w|.
double estimate_translation_constant(const NumericGerm& g, double R0, int samples);

struct PetalOptions {
    double R0 = 0.0;       // 0: choose from c_bound
    double c_bound = -1;   // <0: estimate
    int invariance_samples = 64;
};

std::vector<Petal> build_petals(const NumericGerm& g, long j_min, long j_max,
                                const PetalOptions& opt = {});

struct FatouResult {
    Cd value;
    long iterations = 0;
    double tail_estimate = 0;  // |last orbit increment| * safety
    double delta_ratio = 0;    // certificate |delta|/(|z|^{alpha-1} |l|^{m+2}) at p
};

// Numeric Fatou coordinate at p in the given petal, normalized against the
// formal coordinate (constant term 0): the full truncated formal coordinate
// is used as the subtracted profile, which telescopes the orbit sum to
//   Psi(p) = Psi_T(f^{o(N+1)} p) - (N+1)
// on attracting petals (and to Psi_T(f^{o-N} p) + N on repelling ones).
FatouResult numeric_fatou(const NumericGerm& g, const Petal& petal, const FatouSeries& psi_formal,
                          const SurfacePoint& p, double tol = 1e-12, long cap = 1000000);

// Newton inversion of the Fatou coordinate on a petal.
SurfacePoint fatou_inverse(const std::function<Cd(const SurfacePoint&)>& fatou,
                           const TS& psi_profile, Cd w, const Petal& petal, double tol = 1e-11);

// Orbit in the zeta chart (for the CLI's csv output).
std::vector<SurfacePoint> orbit(const NumericGerm& g, SurfacePoint p, long n, int dir = +1);

}  // namespace dulac
