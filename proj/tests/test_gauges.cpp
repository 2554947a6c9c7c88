#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "rw/errors.hpp"
#include "rw/gauges.hpp"
#include "rw/measure.hpp"

using namespace rw;

namespace {

AtomicMeasure single_atom(double w, double x0 = 0.3, double y0 = 0.7) {
    return AtomicMeasure({2, 1.5}, {{{x0, y0, 0.0}, w}});
}

// composite Simpson oracle for int Phi(m(r)/r^s) dr/r in u = log r, on an
// interval where the ball mass is the constant m
double simpson_piece(const Gauge& g, double s, double m, double p, double q, int panels) {
    double a = std::log(p), b = std::log(q), h = (b - a) / panels;
    double acc = 0.0;
    auto f = [&](double u) { return g(m * std::exp(-s * u)); };
    for (int i = 0; i < panels; ++i) {
        double u0 = a + i * h;
        acc += h / 6.0 * (f(u0) + 4.0 * f(u0 + h / 2.0) + f(u0 + h));
    }
    return acc;
}

}  // namespace

TEST_CASE("smooth gauge v: closed-form values and breakpoint continuity") {
    CHECK(SmoothGaugeV::v(0.0) == 0.0);
    CHECK(SmoothGaugeV::dv(0.0) == 0.0);
    CHECK(std::abs(SmoothGaugeV::v(2.0) - 11.0 / 3.0) <= 1e-12);
    CHECK(SmoothGaugeV::v(1.0) == 1.0);
    // C^1 at the breakpoints: polynomial pieces agree in value and slope
    CHECK(std::abs((2.0 * 1.0 - 1.0 / 3.0 - 1.0 + 1.0 / 3.0) - 1.0) <= 1e-15);
    CHECK(SmoothGaugeV::dv(1.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(SmoothGaugeV::dv(2.0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(SmoothGaugeV::v(3.0) == doctest::Approx(11.0 / 3.0 + 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(SmoothGaugeV::v(-0.5), std::invalid_argument);
}

TEST_CASE("smooth gauge v: grid invariants") {
    const int n = 10000;
    double prev_ddv = SmoothGaugeV::ddv(1e-6);
    for (int i = 0; i <= n; ++i) {
        double t = 1e-6 * std::pow(1e8, static_cast<double>(i) / n);  // up to 100
        double v = SmoothGaugeV::v(t), dv = SmoothGaugeV::dv(t), ddv = SmoothGaugeV::ddv(t);
        CHECK(ddv <= prev_ddv + 1e-15);  // v'' non-increasing
        prev_ddv = ddv;
        if (t >= 2.0) CHECK(ddv == 0.0);
        CHECK(v <= t * t * (1.0 + 1e-12));
        CHECK(v >= std::min(t, t * t) * (1.0 - 1e-12));
        CHECK(dv * dv <= 4.0 * v * (1.0 + 1e-12));
        for (double a : {1.01, 2.0, 10.0})
            CHECK(SmoothGaugeV::v(a * t) <= a * a * v * (1.0 + 1e-12));
    }
}

TEST_CASE("gauge kinds: values and admissibility witnesses") {
    Gauge p2 = Gauge::power(2.0);
    CHECK(p2(3.0) == 9.0);
    CHECK(p2.sigma() == 1.0);
    CHECK(p2.kappa() == 1.0);
    Gauge ph = Gauge::power(0.5);
    CHECK(ph.sigma() == 0.5);

    Gauge e3 = Gauge::exponential(3.0);
    CHECK(e3(0.0) == 0.0);
    CHECK(e3(1.0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(e3.sigma() == 1.0);
    CHECK(e3.kappa() == doctest::Approx(std::pow(3.0, 1.0 / 3.0)).epsilon(1e-15));

    Gauge sv = Gauge::smooth_v();
    CHECK(sv(2.0) == doctest::Approx(11.0 / 3.0).epsilon(1e-14));
    CHECK(sv.kappa() == 2.0);

    Gauge ind = Gauge::indicator(0.25);
    CHECK(ind(0.25) == 0.0);
    CHECK(ind(0.2500001) == 1.0);

    CHECK_THROWS_AS(Gauge::power(0.0), std::invalid_argument);
    CHECK_THROWS_AS(Gauge::exponential(-1.0), std::invalid_argument);
    CHECK_THROWS_AS(p2(-1.0), std::invalid_argument);
}

TEST_CASE("default_beta") {
    CHECK(default_beta({2, 1.5}) == 3.0);
    CHECK(default_beta({3, 2.5}) == 3.0);
    // (s-d+2)/(s-d+1) = 6 when s-d = -0.8
    CHECK(default_beta({2, 1.2}) == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(default_beta({3, 2.2}) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("gauge admissibility check passes for the shipped gauges") {
    for (const Gauge& g : {Gauge::power(2.0), Gauge::power(0.5), Gauge::exponential(3.0),
                           Gauge::exponential(6.0), Gauge::smooth_v()}) {
        auto rep = gauge_admissibility_check(g, 2000);
        CHECK(rep.pass);
    }
    CHECK_THROWS_AS(gauge_admissibility_check(Gauge::power(1.0), 10), std::invalid_argument);
}

TEST_CASE("wolff potential: single-atom power-gauge closed form") {
    const double w = 0.37, s = 1.5;
    AtomicMeasure mu = single_atom(w);
    Point x{0.3, 0.2, 0.0};  // distance 0.5 from the atom
    const double rho = 0.5;
    for (double p : {2.0, 0.75}) {
        ScaleWindow win{0.01, 8.0};
        double lo = std::max(rho, win.r_min);
        double expect = std::pow(w, p) / (p * s) *
                        (std::pow(lo, -p * s) - std::pow(win.r_max, -p * s));
        CHECK(wolff_potential(mu, x, Gauge::power(p), win) ==
              doctest::Approx(expect).epsilon(1e-13));
    }
    // window entirely below the atom distance: zero mass, zero potential
    CHECK(wolff_potential(mu, x, Gauge::power(2.0), {0.01, 0.4}) == 0.0);
}

TEST_CASE("wolff potential: indicator gauge equals scale-set log measure") {
    const double w = 0.37, s = 1.5, Delta = 0.1, rho = 0.5;
    AtomicMeasure mu = single_atom(w);
    Point x{0.3, 0.2, 0.0};
    double t = std::pow(w / Delta, 1.0 / s);
    ScaleWindow win{0.01, 8.0};
    double expect = std::log(std::min(t, win.r_max) / std::max(rho, win.r_min));
    CHECK(wolff_potential(mu, x, Gauge::indicator(Delta), win) ==
          doctest::Approx(expect).epsilon(1e-13));
}

TEST_CASE("wolff potential: quadrature gauges match a fine Simpson oracle") {
    AtomicMeasure mu({2, 1.5}, {{{0.1, 0.2, 0.0}, 0.4},
                                {{0.8, 0.25, 0.0}, 0.35},
                                {{0.45, 0.9, 0.0}, 0.25}});
    Point x{0.5, 0.5, 0.0};
    ScaleWindow win{1e-3, 50.0};
    auto prof = mu.distance_profile(x);
    for (const Gauge& g : {Gauge::exponential(3.0), Gauge::smooth_v()}) {
        double oracle = 0.0;
        std::vector<double> brk{win.r_min};
        for (double d : prof.dist)
            if (d > win.r_min && d < win.r_max) brk.push_back(d);
        brk.push_back(win.r_max);
        for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
            double m = mu.ball_mass(x, brk[i + 1]);  // constant on (brk[i], brk[i+1]]
            oracle += simpson_piece(g, 1.5, m, brk[i], brk[i + 1], 4000);
        }
        double got = wolff_potential(mu, x, g, win);
        CHECK(got == doctest::Approx(oracle).epsilon(1e-8));
    }
}

TEST_CASE("wolff potential: divergence and window validation") {
    AtomicMeasure mu = single_atom(1.0);
    CHECK_THROWS_AS(wolff_potential(mu, {0.3, 0.7, 0.0}, Gauge::power(2.0), {0.0, 1.0}),
                    DivergenceError);
    CHECK_THROWS_AS(wolff_potential(mu, {0.0, 0.0, 0.0}, Gauge::power(2.0), {1.0, 0.5}),
                    std::invalid_argument);
    // atom exactly at x is fine once r_min > 0
    CHECK(wolff_potential(mu, {0.3, 0.7, 0.0}, Gauge::power(2.0), {0.01, 1.0}) > 0.0);
}

TEST_CASE("wolff energy: two-atom closed form") {
    const double w1 = 0.3, w2 = 0.5, s = 1.5, rho = 0.25;
    AtomicMeasure mu({2, s}, {{{0.0, 0.0, 0.0}, w1}, {{rho, 0.0, 0.0}, w2}});
    ScaleWindow win{0.05, 4.0};
    auto piece = [&](double m, double p, double q) {
        return m * m / (2.0 * s) * (std::pow(p, -2.0 * s) - std::pow(q, -2.0 * s));
    };
    // open balls: the neighbour enters the mass only for r > rho
    double W1 = piece(w1, win.r_min, rho) + piece(w1 + w2, rho, win.r_max);
    double W2 = piece(w2, win.r_min, rho) + piece(w1 + w2, rho, win.r_max);
    CHECK(wolff_energy(mu, win) ==
          doctest::Approx(w1 * W1 + w2 * W2).epsilon(1e-13));
    CHECK_THROWS_AS(wolff_energy(mu, {0.0, 1.0}), std::invalid_argument);
}
