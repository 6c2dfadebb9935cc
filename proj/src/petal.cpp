#include "dulac/petal.hpp"

#include <cmath>
#include <random>

namespace dulac {

Cd w_chart_log(Cd zeta, double a, double alpha, double m) {
    Cd pref = std::log(Cd(a * (alpha - 1), 0.0));  // +i pi for a < 0
    return -pref + (alpha - 1) * zeta + m * std::log(zeta);
}

Cd to_w_chart(const SurfacePoint& p, double a, double alpha, double m) {
    return std::exp(w_chart_log(p.zeta, a, alpha, m));
}

double Petal::w_halfwidth(double abs_w) const {
    double lw = std::log(std::max(abs_w, 1.0000001));
    double s = std::min(1.0, c_bound / lw);
    return M_PI - std::asin(s);
}

bool Petal::contains(const SurfacePoint& p) const {
    if (!dom.contains(p.zeta)) return false;
    Cd lw = w_chart_log(p.zeta, a_eff(), alpha, m);
    double abs_w = std::exp(lw.real());
    if (abs_w <= R0) return false;
    double s = lw.imag() + 2 * M_PI * double(j);
    return std::abs(s) < w_halfwidth(abs_w);
}

namespace {

// Solve (alpha-1) zeta + m Log zeta = target by fixed point; the log term is
// subdominant on every standard quadratic domain.
Cd chart_solve(Cd target, double alpha, double m) {
    Cd zeta = target / (alpha - 1);
    for (int it = 0; it < 60; ++it) {
        Cd next = (target - m * std::log(zeta)) / (alpha - 1);
        if (std::abs(next - zeta) < 1e-14 * (1.0 + std::abs(next))) return next;
        zeta = next;
    }
    return zeta;
}

// zeta of the point on petal `p` with log|w| = lw and angular offset theta
// from the petal center (theta in (-halfwidth, halfwidth)).
Cd petal_point_zeta(const Petal& p, double lw, double theta) {
    Cd pref = std::log(Cd(p.a_eff() * (p.alpha - 1), 0.0));
    Cd target = pref + Cd(lw, theta - 2 * M_PI * double(p.j));
    return chart_solve(target, p.alpha, p.m);
}

SurfacePoint petal_step(const NumericGerm& g, const Petal& petal, const SurfacePoint& p) {
    // On the attracting petal the orbit of f converges, on the repelling
    // petal the orbit of f^{-1} does.
    return petal.sign > 0 ? g.eval(p) : g.eval_inverse(p);
}

}  // namespace

UniformBoundReport verify_uniform_bound(const NumericGerm& g, int samples) {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ulevel(-3.0, 3.0);
    std::uniform_real_distribution<double> uspan(0.0, 1.0);
    double a = g.a(), alpha = g.alpha(), m = double(g.m());
    UniformBoundReport rep;
    int accepted = 0;
    for (int i = 0; i < samples; ++i) {
        double im = -2 * M_PI * ulevel(rng);
        double re0 = std::max(g.domain().min_re(im), 2.5);
        double re = re0 + 0.5 + 9.5 * uspan(rng);
        Cd zeta(re, im);
        SurfacePoint p = surface_point(zeta);
        SurfacePoint q;
        try {
            q = g.eval(p);
        } catch (const numeric_error&) {
            continue;
        }
        // |f(z) - z + a z^alpha l^m| / |z^alpha l^{m+1}| in the chart:
        // f - z = z (e^{zeta - zeta'} - 1)
        Cd diff = std::exp(-p.zeta) * (std::exp(p.zeta - q.zeta) - 1.0) +
                  a * std::exp(-alpha * zeta) * std::pow(zeta, -m);
        double denom = std::exp(-alpha * re) * std::pow(std::abs(zeta), -(m + 1));
        double ratio = std::abs(diff) / denom;
        if (++accepted <= samples / 2) rep.c_est_half = std::max(rep.c_est_half, ratio);
        rep.c_est = std::max(rep.c_est, ratio);
    }
    rep.pass = accepted > samples / 2 && std::isfinite(rep.c_est) &&
               rep.c_est <= 1.6 * std::max(rep.c_est_half, 1e-9);
    return rep;
}

double estimate_translation_constant(const NumericGerm& g, double R0, int samples) {
    // sup |F(w) - (w+1)| * log|w| over level-0 attracting-petal samples.
    Petal probe;
    probe.j = 0;
    probe.sign = +1;
    probe.a = g.a();
    probe.alpha = g.alpha();
    probe.m = double(g.m());
    probe.c_bound = 0.0;  // sample the full half-width
    probe.R0 = R0;
    probe.dom = g.domain();
    double worst = 0.0;
    int used = 0;
    for (int i = 0; i < samples; ++i) {
        double lw = std::log(R0) + 2.5 * (i % 7) / 6.0;
        double th = -0.55 * M_PI + 1.1 * M_PI * ((i * 13) % samples) / double(samples);
        Cd zeta = petal_point_zeta(probe, lw, th);
        if (!g.domain().contains(zeta)) continue;
        SurfacePoint p = surface_point(zeta);
        SurfacePoint q;
        try {
            q = g.eval(p);
        } catch (const numeric_error&) {
            continue;
        }
        Cd w0 = to_w_chart(p, probe.a_eff(), probe.alpha, probe.m);
        Cd w1 = to_w_chart(q, probe.a_eff(), probe.alpha, probe.m);
        worst = std::max(worst, std::abs(w1 - w0 - 1.0) * lw);
        ++used;
    }
    if (used == 0) throw numeric_error("translation-constant estimate: no usable samples");
    return worst;
}

std::vector<Petal> build_petals(const NumericGerm& g, long j_min, long j_max,
                                const PetalOptions& opt) {
    double R0 = opt.R0 > 0 ? opt.R0 : 12.0;
    double c = opt.c_bound >= 0 ? opt.c_bound
                                : std::max(estimate_translation_constant(g, R0, 48), 0.05);
    if (opt.R0 <= 0) R0 = std::max(12.0, std::exp(c) * 1.5);

    std::vector<Petal> out;
    for (long j = j_min; j <= j_max; ++j) {
        for (int sign : {+1, -1}) {
            Petal p;
            p.j = j;
            p.sign = sign;
            p.a = g.a();
            p.alpha = g.alpha();
            p.m = double(g.m());
            p.c_bound = c;
            p.R0 = R0;
            p.dom = g.domain();
            out.push_back(p);
        }
    }
    // sampled forward-invariance check
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (auto& p : out) {
        int checked = 0;
        for (int i = 0; i < opt.invariance_samples; ++i) {
            double lw = std::log(p.R0) + 2.5 * u01(rng);
            double abs_w = std::exp(lw);
            double th = (2 * u01(rng) - 1) * (p.w_halfwidth(abs_w) - 1e-3);
            SurfacePoint pt = surface_point(petal_point_zeta(p, lw, th));
            if (!p.contains(pt)) continue;
            ++checked;
            SurfacePoint img;
            try {
                img = petal_step(g, p, pt);
            } catch (const numeric_error&) {
                throw numeric_error("petal invariance check: evaluation failed");
            }
            if (!p.contains(img))
                throw numeric_error(
                    "petal invariance check failed (c_bound too small; re-estimate)");
        }
        if (checked == 0) throw numeric_error("petal invariance check: no interior samples");
    }
    return out;
}

FatouResult numeric_fatou(const NumericGerm& g, const Petal& petal, const FatouSeries& psi_formal,
                          const SurfacePoint& p, double tol, long cap) {
    if (!petal.contains(p)) throw numeric_error("numeric_fatou: point outside petal");
    const TS& psi_T = psi_formal.body;
    double alpha = g.alpha(), m = double(g.m());
    double sgn = petal.sign > 0 ? 1.0 : -1.0;
    FatouResult res;

    // (8.4) certificate: the defect of the infinite part (blocks of
    // non-positive z-exponent) must be O(z^{alpha-1} l^{m+2}) at p.
    {
        TS psi_inf = TS::zero(psi_T.basis(), psi_T.budget());
        for (auto& [k, c] : psi_T.terms())
            if (k.z <= 0) psi_inf.add_term(k.z, k.l, k.l2, c);
        SurfacePoint q = petal_step(g, petal, p);
        Cd delta0 = sgn - eval_series(psi_inf, q.zeta) + eval_series(psi_inf, p.zeta);
        double scale =
            std::pow(p.abs_z(), alpha - 1) * std::pow(std::abs(p.zeta), -(m + 2));
        res.delta_ratio = std::abs(delta0) / scale;
        if (!(res.delta_ratio < 1e4))
            throw numeric_error("numeric_fatou: delta bound check failed (deepen psi_formal)");
    }

    SurfacePoint cur = p;
    Cd psi_here = eval_series(psi_T, cur.zeta);
    long consecutive_small = 0;
    for (long i = 1; i <= cap; ++i) {
        SurfacePoint nxt = petal_step(g, petal, cur);
        Cd psi_next = eval_series(psi_T, nxt.zeta);
        Cd delta = sgn - psi_next + psi_here;  // Psi_T defect along the orbit
        cur = nxt;
        psi_here = psi_next;
        res.iterations = i;
        res.tail_estimate = 5.0 * std::abs(delta);
        if (std::abs(delta) < 0.2 * tol) {
            if (++consecutive_small >= 2) break;
        } else {
            consecutive_small = 0;
        }
        if (i == cap)
            throw numeric_error("numeric_fatou: orbit sum did not converge within the cap");
    }
    // telescoped value: Psi(p) = Psi_T(f^{oN} p) -+ N
    res.value = psi_here - sgn * double(res.iterations);
    return res;
}

SurfacePoint fatou_inverse(const std::function<Cd(const SurfacePoint&)>& fatou,
                           const TS& psi_profile, Cd w, const Petal& petal, double tol) {
    // Seed by inverting the leading w-chart behavior of the Fatou coordinate
    // (computed with the germ's own leading coefficient a, on petal level j).
    double alpha = petal.alpha, m = petal.m;
    Cd pref_a = std::log(Cd(petal.a * (alpha - 1), 0.0));
    Cd pref_eff = std::log(Cd(petal.a_eff() * (alpha - 1), 0.0));
    double theta_raw = std::arg(w) + pref_a.imag() - pref_eff.imag();
    long k = std::lround((-2 * M_PI * double(petal.j) - theta_raw) / (2 * M_PI));
    double theta = theta_raw + 2 * M_PI * double(k) + 2 * M_PI * double(petal.j);
    Cd target = pref_eff + Cd(std::log(std::abs(w)), theta - 2 * M_PI * double(petal.j));
    Cd zeta = chart_solve(target, alpha, m);

    Cd err;
    for (int it = 0; it < 80; ++it) {
        SurfacePoint pt = surface_point(zeta);
        if (!petal.dom.contains(pt.zeta))
            throw numeric_error("fatou_inverse: iterate left the domain");
        err = fatou(pt) - w;
        if (std::abs(err) < tol) return pt;
        Cd slope = eval_series_dzeta(psi_profile, zeta);
        if (!(std::abs(slope) > 1e-16)) throw numeric_error("fatou_inverse: flat derivative");
        zeta -= err / slope;
    }
    throw numeric_error("fatou_inverse: Newton did not converge (|residual| = " +
                        std::to_string(std::abs(err)) + ")");
}

std::vector<SurfacePoint> orbit(const NumericGerm& g, SurfacePoint p, long n, int dir) {
    std::vector<SurfacePoint> out;
    out.reserve(std::size_t(n) + 1);
    out.push_back(p);
    for (long i = 0; i < n; ++i) {
        p = dir > 0 ? g.eval(p) : g.eval_inverse(p);
        out.push_back(p);
    }
    return out;
}

}  // namespace dulac
