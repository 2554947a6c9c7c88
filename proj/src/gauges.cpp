#include "rw/gauges.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "rw/errors.hpp"

namespace rw {

Gauge Gauge::power(double p) {
    if (!(p > 0.0)) throw std::invalid_argument("power gauge requires p > 0");
    return Gauge(Kind::Power, p, std::min(p, 1.0), 1.0);
}

Gauge Gauge::exponential(double beta) {
    if (!(beta > 0.0)) throw std::invalid_argument("exponential gauge requires beta > 0");
    // (e^{-t^-beta} t^-sigma)' >= 0 iff beta t^-beta >= sigma; with sigma = 1
    // this holds up to t = beta^{1/beta}
    return Gauge(Kind::Exponential, beta, 1.0, std::pow(beta, 1.0 / beta));
}

Gauge Gauge::smooth_v() { return Gauge(Kind::SmoothV, 0.0, 1.0, 2.0); }

Gauge Gauge::indicator(double Delta) {
    if (!(Delta > 0.0)) throw std::invalid_argument("indicator gauge requires Delta > 0");
    return Gauge(Kind::Indicator, Delta, 1.0, Delta);
}

double Gauge::operator()(double t) const {
    if (!(t >= 0.0)) throw std::invalid_argument("gauge argument must be >= 0");
    switch (kind_) {
        case Kind::Power:
            return std::pow(t, param_);
        case Kind::Exponential:
            return t == 0.0 ? 0.0 : std::exp(-std::pow(t, -param_));
        case Kind::SmoothV:
            return SmoothGaugeV::v(t);
        case Kind::Indicator:
            return t > param_ ? 1.0 : 0.0;
    }
    return 0.0;
}

double default_beta(const AmbientParams& amb) {
    amb.validate();
    return std::max(3.0, (amb.s - amb.d + 2.0) / (amb.s - amb.d + 1.0));
}

double SmoothGaugeV::v(double t) {
    if (!(t >= 0.0)) throw std::invalid_argument("v argument must be >= 0");
    if (t <= 1.0) return t * t;
    if (t <= 2.0) return 2.0 * t * t - t * t * t / 3.0 - t + 1.0 / 3.0;
    return 11.0 / 3.0 + 3.0 * (t - 2.0);
}

double SmoothGaugeV::dv(double t) {
    if (t <= 1.0) return 2.0 * t;
    if (t <= 2.0) return 4.0 * t - t * t - 1.0;
    return 3.0;
}

double SmoothGaugeV::ddv(double t) {
    if (t <= 1.0) return 2.0;
    if (t <= 2.0) return 2.0 * (2.0 - t);
    return 0.0;
}

AdmissibilityReport gauge_admissibility_check(const Gauge& g, int grid_size) {
    if (grid_size < 100) throw std::invalid_argument("grid_size must be >= 100");
    AdmissibilityReport rep;
    if (g(0.0) != 0.0) {
        rep.pass = false;
        rep.first_violation_t = 0.0;
        rep.what = "Phi(0) != 0";
        return rep;
    }
    // strict monotonicity on a log grid (equality tolerated only in the
    // underflow region where both values are exactly 0)
    const double t_lo = 1e-8, t_hi = std::max(10.0 * g.kappa(), 100.0);
    double prev_t = t_lo, prev_v = g(t_lo);
    for (int i = 1; i <= grid_size; ++i) {
        double t = t_lo * std::pow(t_hi / t_lo, static_cast<double>(i) / grid_size);
        double v = g(t);
        bool ok = v > prev_v || (v == 0.0 && prev_v == 0.0);
        if (!ok) {
            rep.pass = false;
            rep.first_violation_t = t;
            rep.what = "Phi not strictly increasing";
            return rep;
        }
        prev_t = t;
        prev_v = v;
    }
    (void)prev_t;
    // Phi(t)/t^sigma nondecreasing on (0, kappa]
    const double k_lo = g.kappa() * 1e-6;
    double prev_ratio = g(k_lo) / std::pow(k_lo, g.sigma());
    for (int i = 1; i <= grid_size; ++i) {
        double t = k_lo * std::pow(g.kappa() / k_lo, static_cast<double>(i) / grid_size);
        double ratio = g(t) / std::pow(t, g.sigma());
        if (ratio < prev_ratio * (1.0 - 1e-12)) {
            rep.pass = false;
            rep.first_violation_t = t;
            rep.what = "Phi(t)/t^sigma decreasing on (0, kappa]";
            return rep;
        }
        prev_ratio = ratio;
    }
    return rep;
}

namespace {

// adaptive Simpson for int_a^b f(u) du
double simpson(double fa, double fm, double fb, double a, double b) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

template <class F>
double adapt(const F& f, double a, double b, double fa, double fm, double fb, double whole,
             double eps, int depth) {
    double m = 0.5 * (a + b);
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(fa, flm, fm, a, m);
    double right = simpson(fm, frm, fb, m, b);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * eps)
        return left + right + (left + right - whole) / 15.0;
    return adapt(f, a, m, fa, flm, fm, left, eps / 2.0, depth - 1) +
           adapt(f, m, b, fm, frm, fb, right, eps / 2.0, depth - 1);
}

template <class F>
double adaptive_quad(const F& f, double a, double b, int initial, double rel_tol) {
    // split into 'initial' panels first so narrow features are not missed
    double rough = 0.0;
    std::vector<double> xs(initial + 1);
    for (int i = 0; i <= initial; ++i) xs[i] = a + (b - a) * i / initial;
    std::vector<double> fs(initial + 1);
    for (int i = 0; i <= initial; ++i) fs[i] = f(xs[i]);
    for (int i = 0; i < initial; ++i)
        rough += simpson(fs[i], f(0.5 * (xs[i] + xs[i + 1])), fs[i + 1], xs[i], xs[i + 1]);
    double eps = rel_tol * std::abs(rough) + 1e-300;
    double out = 0.0;
    for (int i = 0; i < initial; ++i) {
        double m = 0.5 * (xs[i] + xs[i + 1]);
        double fm = f(m);
        double whole = simpson(fs[i], fm, fs[i + 1], xs[i], xs[i + 1]);
        out += adapt(f, xs[i], xs[i + 1], fs[i], fm, fs[i + 1], whole, eps / initial, 48);
    }
    return out;
}

// int_p^q Phi(m / r^s) dr/r for constant piece mass m
double piece_integral(const Gauge& g, double s, double m, double p, double q,
                      int quad_points) {
    if (m == 0.0) return 0.0;
    switch (g.kind()) {
        case Gauge::Kind::Power: {
            double pw = g.param();
            return std::pow(m, pw) *
                   (std::pow(p, -pw * s) - std::pow(q, -pw * s)) / (pw * s);
        }
        case Gauge::Kind::Indicator: {
            double t = std::pow(m / g.param(), 1.0 / s);  // density > Delta iff r < t
            double hi = std::min(q, t);
            return hi > p ? std::log(hi / p) : 0.0;
        }
        default: {
            auto f = [&](double u) { return g(m * std::exp(-s * u)); };
            return adaptive_quad(f, std::log(p), std::log(q),
                                 std::max(4, quad_points / 4), 1e-9);
        }
    }
}

}  // namespace

double wolff_potential(const AtomicMeasure& mu, const Point& x, const Gauge& g,
                       const ScaleWindow& window, int quad_points) {
    window.validate();
    if (mu.size() == 0) return 0.0;
    auto prof = mu.distance_profile(x);
    const double s = mu.s();

    if (window.r_min == 0.0 && prof.dist[0] == 0.0)
        throw DivergenceError("wolff_potential: atom at x with r_min = 0");

    // breakpoints: r_min, interior jump distances, r_max
    std::vector<double> brk{window.r_min};
    for (double d : prof.dist)
        if (d > window.r_min && d < window.r_max) brk.push_back(d);
    brk.push_back(window.r_max);

    double W = 0.0;
    for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
        double p = brk[i], q = brk[i + 1];
        // mass on (p, q): largest profile index with dist <= p
        auto it = std::upper_bound(prof.dist.begin(), prof.dist.end(), p);
        if (it == prof.dist.begin()) continue;  // zero mass below the first atom
        double m = prof.mass[static_cast<std::size_t>(it - prof.dist.begin()) - 1];
        W += piece_integral(g, s, m, p, q, quad_points);
    }
    return W;
}

double wolff_energy(const AtomicMeasure& mu, const ScaleWindow& window) {
    window.validate();
    if (!(window.r_min > 0.0))
        throw std::invalid_argument("wolff_energy requires r_min > 0");
    Gauge g2 = Gauge::power(2.0);
    double E = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i)
        E += mu.atom(i).w * wolff_potential(mu, mu.atom(i).pos, g2, window);
    return E;
}

}  // namespace rw
