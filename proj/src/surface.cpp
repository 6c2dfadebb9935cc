#include "dulac/surface.hpp"

#include <boost/numeric/odeint.hpp>
#include <cmath>

namespace dulac {

double QuadraticDomain::min_re(double im) const {
    if (C == 0.0) {
        double rad2 = R * R - im * im;
        return rad2 > 0 ? std::sqrt(rad2) : 0.0;
    }
    // Boundary piece from Re(xi) = 0: xi = iy, zeta = iy + C sqrt(1+iy);
    // solve Im(zeta(y)) = im for y by Newton, then Re is the boundary value.
    double y = im;
    for (int it = 0; it < 60; ++it) {
        Cd s = std::sqrt(Cd(1.0, y));
        double g = y + C * s.imag() - im;
        // d/dy Im(C sqrt(1+iy)) = C * Im(i / (2 sqrt(1+iy)))
        Cd ds = Cd(0, 1) / (2.0 * s);
        double dg = 1.0 + C * ds.imag();
        double step = g / dg;
        y -= step;
        if (std::abs(step) < 1e-12 * (1.0 + std::abs(y))) break;
    }
    Cd s = std::sqrt(Cd(1.0, y));
    double re_axis = C * s.real();
    // Boundary piece from |xi| = R can stick out further for small |im|.
    double re_disc = 0.0;
    if (std::abs(im) < R + C * std::sqrt(1.0 + R)) {
        // xi = R e^{i t}: find t with Im(zeta) = im (coarse scan + refine)
        double best = 0.0;
        for (int i = 0; i <= 200; ++i) {
            double t = -M_PI / 2 + M_PI * i / 200.0;
            Cd xi = R * std::exp(Cd(0, t));
            Cd zb = xi + C * std::sqrt(xi + 1.0);
            if (std::abs(zb.imag() - im) < 0.05 * (1.0 + std::abs(im)))
                best = std::max(best, zb.real());
        }
        re_disc = best;
    }
    return std::max(re_axis, re_disc);
}

Cd eval_series(const TS& s, Cd zeta) {
    Cd acc(0.0, 0.0);
    Cd logz = std::log(zeta);
    for (auto& [k, c] : s.terms()) {
        Cd term = std::exp(-k.z.get_d() * zeta);
        if (k.l != 0) term *= std::pow(zeta, double(-k.l));
        if (k.l2 != 0) term *= std::pow(logz, double(-k.l2));
        acc += coeff<CQ>::approx(c) * term;
    }
    return acc;
}

Cd eval_series_dzeta(const TS& s, Cd zeta) {
    Cd acc(0.0, 0.0);
    Cd logz = std::log(zeta);
    for (auto& [k, c] : s.terms()) {
        Cd term = std::exp(-k.z.get_d() * zeta);
        if (k.l != 0) term *= std::pow(zeta, double(-k.l));
        if (k.l2 != 0) term *= std::pow(logz, double(-k.l2));
        Cd factor = Cd(-k.z.get_d(), 0.0);
        if (k.l != 0) factor -= double(k.l) / zeta;
        if (k.l2 != 0) factor -= double(k.l2) / (zeta * logz);
        acc += coeff<CQ>::approx(c) * term * factor;
    }
    return acc;
}

double series_tail_estimate(const TS& s, Cd zeta) {
    if (s.is_zero()) return 0.0;
    auto last = std::prev(s.terms().end());
    const MonKey& k = last->first;
    double mag = std::abs(coeff<CQ>::approx(last->second)) *
                 std::abs(std::exp(-k.z.get_d() * zeta)) *
                 std::pow(std::abs(zeta), double(-k.l));
    return 10.0 * mag;
}

NumericGerm::NumericGerm(GermDefinition def, double tolerance)
    : def_(std::move(def)), tol_(tolerance), dom_{def_.dom_C, def_.dom_R} {
    if (def_.backend == Backend::series) {
        TS id = TS::identity(def_.basis, def_.budget);
        u_fwd_ = (def_.body - id).shifted(CQ(1), Rat(-1), 0, 0);
        u_inv_ = (invert_series(def_.body) - id).shifted(CQ(1), Rat(-1), 0, 0);
    } else if (def_.backend == Backend::flow) {
        xi_over_z_ = def_.body.shifted(CQ(1), Rat(-1), 0, 0);
    }
}

const TS& NumericGerm::expansion() const {
    if (!expansion_) expansion_ = def_.expansion();
    return *expansion_;
}

Cd NumericGerm::series_step(Cd zeta, const TS& u_series) const {
    Cd u = eval_series(u_series, zeta);
    if (std::abs(u) > 0.8)
        throw numeric_error("germ evaluation outside the series' reliable range");
    return zeta - std::log(1.0 + u);
}

Cd NumericGerm::flow_step(Cd zeta, double time) const {
    namespace ode = boost::numeric::odeint;
    using state = Cd;
    auto rhs = [this](const state& y, state& dydt, double) {
        dydt = -eval_series(xi_over_z_, y);  // dzeta/dt = -xi(z)/z
    };
    state y = zeta;
    auto stepper = ode::make_controlled(1e-13, 1e-13,
                                        ode::runge_kutta_fehlberg78<state, double, state, double,
                                                                    ode::vector_space_algebra>());
    double t0 = 0.0;
    double dt = 0.05 * (time >= 0 ? 1 : -1);
    try {
        ode::integrate_adaptive(stepper, rhs, y, t0, time, dt);
    } catch (const std::exception& e) {
        throw numeric_error(std::string("flow integration failed: ") + e.what());
    }
    return y;
}

Cd NumericGerm::expr_step(Cd zeta) const {
    Cd w = eval_expr(def_.expr, zeta);
    Cd u = w * std::exp(zeta) - 1.0;  // f(z)/z - 1
    if (std::abs(u) > 0.8)
        throw numeric_error("expression evaluation outside the parabolic range");
    return zeta - std::log(1.0 + u);
}

Cd NumericGerm::expr_inverse_step(Cd zeta) const {
    // Newton on g(x) = zeta_f(x) - zeta, seeded by the parabolic approximation.
    Cd x = zeta;
    {
        Cd w = eval_expr(def_.expr, zeta);
        Cd u = w * std::exp(zeta) - 1.0;
        x = zeta + std::log(1.0 + u);  // first-order guess for f^{-1}
    }
    ExprPtr dexpr = expr_derivative(def_.expr);
    for (int it = 0; it < 60; ++it) {
        Cd fx = eval_expr(def_.expr, x);
        Cd zeta_f = x - std::log(fx * std::exp(x));
        Cd g = zeta_f - zeta;
        if (std::abs(g) < 1e-13) return x;
        // dzeta_f/dx = z f'(z)/f(z), z = e^{-x}
        Cd z = std::exp(-x);
        Cd df = eval_expr(dexpr, x);
        Cd slope = z * df / fx;
        if (std::abs(slope) < 1e-14) break;
        x -= g / slope;
    }
    Cd fx = eval_expr(def_.expr, x);
    if (std::abs(x - std::log(fx * std::exp(x)) - zeta) > 1e-10)
        throw numeric_error("expression inverse: Newton did not converge");
    return x;
}

SurfacePoint NumericGerm::step(const SurfacePoint& p, int dir) const {
    Cd out;
    switch (def_.backend) {
        case Backend::series:
            out = series_step(p.zeta, dir > 0 ? u_fwd_ : u_inv_);
            break;
        case Backend::flow:
            out = flow_step(p.zeta, dir > 0 ? def_.flow_time.get_d() : -def_.flow_time.get_d());
            break;
        case Backend::expression:
            out = dir > 0 ? expr_step(p.zeta) : expr_inverse_step(p.zeta);
            break;
        default:
            throw numeric_error("unknown backend");
    }
    return surface_point(out);
}

}  // namespace dulac
