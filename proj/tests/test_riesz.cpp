#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "rw/errors.hpp"
#include "rw/measure.hpp"
#include "rw/riesz.hpp"

using namespace rw;

TEST_CASE("single-atom closed form") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        int d = trial % 2 ? 3 : 2;
        double s = (d - 1) + 0.05 + 0.9 * uni(rng);
        Point a{uni(rng), uni(rng), d == 3 ? uni(rng) : 0.0};
        Point x{2.0 * uni(rng) - 0.5, 2.0 * uni(rng) - 0.5, d == 3 ? uni(rng) : 0.0};
        double w = 0.1 + uni(rng);
        AtomicMeasure mu({d, s}, {{a, w}});
        KernelEval e = riesz_at(mu, x);
        double r = dist(a, x);
        double f = w / std::pow(r, 1.0 + s);
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(e.value[c] - f * (a[c] - x[c])) <= 1e-12);
        CHECK(e.terms_used == 1);
    }
}

TEST_CASE("truncation annulus is strict at both ends") {
    AtomicMeasure mu({2, 1.5}, {{{1.0, 0.0, 0.0}, 1.0},    // r = 1
                                {{0.0, 2.0, 0.0}, 1.0},    // r = 2
                                {{-3.0, 0.0, 0.0}, 1.0}}); // r = 3
    Point o{0.0, 0.0, 0.0};
    CHECK(riesz_at(mu, o, {1.0, 3.0}).terms_used == 1);  // only r = 2 survives
    CHECK(riesz_at(mu, o, {0.5, 3.0}).terms_used == 2);
    CHECK(riesz_at(mu, o, {0.0, 10.0}).terms_used == 3);
    CHECK_THROWS_AS(riesz_at(mu, o, {2.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(riesz_at(mu, o, {-1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("singularity handling") {
    AtomicMeasure mu({2, 1.5}, {{{0.25, 0.75, 0.0}, 1.0}});
    CHECK_THROWS_AS(riesz_at(mu, {0.25, 0.75, 0.0}), SingularityError);
    // positive inner truncation removes the singular atom
    CHECK(riesz_at(mu, {0.25, 0.75, 0.0}, {1e-9, 10.0}).terms_used == 0);
}

TEST_CASE("kernel antisymmetry") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Point a{uni(rng), uni(rng), 0.0}, x{uni(rng) + 1.5, uni(rng), 0.0};
        double w = 0.2 + uni(rng);
        AtomicMeasure at_a({2, 1.7}, {{a, w}});
        AtomicMeasure at_x({2, 1.7}, {{x, w}});
        KernelEval e1 = riesz_at(at_a, x), e2 = riesz_at(at_x, a);
        for (int c = 0; c < 3; ++c) CHECK(e1.value[c] == -e2.value[c]);
    }
}

TEST_CASE("adjoint duality <R mu, nu> = <mu, R* nu>") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    AmbientParams amb{2, 1.5};
    std::vector<Atom> atoms;
    for (int i = 0; i < 8; ++i) atoms.push_back({{uni(rng), uni(rng), 0.0}, 0.1 + uni(rng)});
    AtomicMeasure mu(amb, atoms);
    std::vector<VectorAtom> nu;
    for (int j = 0; j < 6; ++j)
        nu.push_back({{2.0 + uni(rng), uni(rng), 0.0}, {uni(rng) - 0.5, uni(rng) - 0.5, 0.0}});
    double lhs = 0.0;
    for (const VectorAtom& v : nu) {
        KernelEval e = riesz_at(mu, v.pos);
        lhs += v.w[0] * e.value[0] + v.w[1] * e.value[1] + v.w[2] * e.value[2];
    }
    double rhs = 0.0;
    for (const Atom& a : mu.atoms()) rhs += a.w * riesz_adjoint_at(nu, amb, a.pos);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    CHECK_THROWS_AS(riesz_adjoint_at(nu, amb, nu[0].pos), SingularityError);
}

TEST_CASE("maximal transform excludes the doubled ball") {
    // one far atom; a wide ball swallows it into 2B, a narrow one keeps it
    AtomicMeasure mu({2, 1.5}, {{{4.0, 0.0, 0.0}, 1.0}});
    Point x{0.0, 0.0, 0.0};
    double direct = std::abs(riesz_at(mu, x).value[0]);
    CHECK(riesz_maximal(mu, x, {{{0.0, 0.0, 0.0}, 1.0}}) == doctest::Approx(direct));
    CHECK(riesz_maximal(mu, x, {{{0.0, 0.0, 0.0}, 3.0}}) == 0.0);  // atom at 4 < 2*3
    // atom exactly on the 2B boundary is excluded (strict <)
    CHECK(riesz_maximal(mu, x, {{{0.0, 0.0, 0.0}, 2.0}}) == doctest::Approx(direct));
    CHECK(riesz_maximal(mu, x, {{{0.0, 0.0, 0.0}, 2.0},
                                {{0.0, 0.0, 0.0}, 1.0}}) == doctest::Approx(direct));
    CHECK_THROWS_AS(riesz_maximal(mu, x, {{{9.0, 0.0, 0.0}, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(riesz_maximal(mu, x, {}), std::invalid_argument);
}

TEST_CASE("default ball family contains x and respects bounds") {
    Point x{0.3, 0.4, 0.0};
    auto fam = default_ball_family(x, 2, -3, 2, 1);
    CHECK(!fam.empty());
    for (const BallSpec& b : fam) {
        CHECK(dist(b.center, x) < b.radius);
        CHECK(b.radius >= std::ldexp(1.0, -3));
        CHECK(b.radius <= std::ldexp(1.0, 2));
    }
    auto fam3 = default_ball_family(x, 3, 0, 0, 1);
    CHECK(fam3.size() > fam.size() / 6);  // includes z offsets
}

TEST_CASE("treecode matches direct summation within its certified bound") {
    AtomicMeasure mu = build_cantor_measure(2, 1.5, 5, std::nullopt, 17);  // 1024 atoms
    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Point> targets;
    for (int k = 0; k < 64; ++k)
        targets.push_back({uni(rng) * 1.4 - 0.2, uni(rng) * 1.4 - 0.2, 0.0});
    for (double tol : {1e-4, 1e-8}) {
        auto fast = riesz_field_fast(mu, targets, tol, 0.3, 1);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            KernelEval direct = riesz_at(mu, targets[i]);
            // the certified bound covers the kernel approximation; allow for
            // summation-order roundoff between the two exact evaluations
            for (int c = 0; c < 3; ++c)
                CHECK(std::abs(fast[i].value[c] - direct.value[c]) <=
                      fast[i].error_bound + 1e-12 * (1.0 + std::abs(direct.value[c])));
            // certified global budget: (1+theta)^s * tol * mass / dist_min^s
            double dmin = mu.nearest_atom_dist(targets[i]);
            CHECK(fast[i].error_bound <= std::pow(1.3, 1.5) * tol * mu.total_mass() /
                                             std::pow(dmin, 1.5) * (1.0 + 1e-12));
        }
    }
}

TEST_CASE("treecode is deterministic across thread counts") {
    AtomicMeasure mu = build_cantor_measure(2, 1.5, 4, std::nullopt, 3);
    std::vector<Point> targets;
    for (int k = 0; k < 37; ++k)
        targets.push_back({0.01 * k - 0.1, 0.013 * k, 0.0});
    auto a = riesz_field_fast(mu, targets, 1e-7, 0.3, 1);
    auto b = riesz_field_fast(mu, targets, 1e-7, 0.3, 4);
    for (std::size_t i = 0; i < targets.size(); ++i) {
        CHECK(a[i].value == b[i].value);
        CHECK(a[i].error_bound == b[i].error_bound);
    }
}

TEST_CASE("treecode singularity and argument errors") {
    AtomicMeasure mu = build_cantor_measure(2, 1.5, 3);
    CHECK_THROWS_AS(riesz_field_fast(mu, {mu.atom(5).pos}, 1e-6), SingularityError);
    CHECK_THROWS_AS(riesz_field_fast(mu, {{0.5, 0.5, 0.0}}, 0.0), std::invalid_argument);
}
