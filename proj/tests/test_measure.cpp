#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "rw/measure.hpp"

using namespace rw;

namespace {

AtomicMeasure random_cloud(std::size_t n, int d, double s, std::uint64_t seed,
                           bool with_ties = false) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    std::vector<Atom> atoms;
    atoms.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        Point p{uni(rng), uni(rng), d == 3 ? uni(rng) : 0.0};
        atoms.push_back({p, 0.1 + uni(rng)});
    }
    if (with_ties)  // duplicate positions with fresh weights
        for (std::size_t i = 0; i + 1 < n; i += 7) atoms[i + 1].pos = atoms[i].pos;
    return AtomicMeasure({d, s}, std::move(atoms));
}

}  // namespace

TEST_CASE("ambient validation") {
    CHECK_THROWS_AS(AmbientParams({4, 3.5}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(AmbientParams({2, 1.0}).validate(), std::invalid_argument);  // endpoints excluded
    CHECK_THROWS_AS(AmbientParams({2, 2.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(AmbientParams({3, 1.5}).validate(), std::invalid_argument);
    CHECK_NOTHROW(AmbientParams({2, 1.0000001}).validate());
    CHECK_NOTHROW(AmbientParams({3, 2.999}).validate());
}

TEST_CASE("atom validation") {
    CHECK_THROWS_AS(AtomicMeasure({2, 1.5}, {{{0.0, 0.0, 0.0}, 0.0}}), std::invalid_argument);
    CHECK_THROWS_AS(AtomicMeasure({2, 1.5}, {{{0.0, 0.0, 0.0}, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(AtomicMeasure({2, 1.5}, {{{0.0, 0.0, 1.0}, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(
        AtomicMeasure({2, 1.5}, {{{std::nan(""), 0.0, 0.0}, 1.0}}), std::invalid_argument);
    CHECK_NOTHROW(AtomicMeasure({3, 2.5}, {{{0.0, 0.0, 1.0}, 1.0}}));
    AtomicMeasure empty({2, 1.5}, {});
    CHECK(empty.total_mass() == 0.0);
    CHECK(empty.nearest_atom_dist({0.0, 0.0, 0.0}) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("open ball is strict at the boundary") {
    AtomicMeasure mu({2, 1.5}, {{{1.0, 0.0, 0.0}, 2.0}});
    Point o{0.0, 0.0, 0.0};
    CHECK(mu.ball_mass(o, 1.0) == 0.0);  // |a-x| = r excluded
    CHECK(mu.ball_mass(o, std::nextafter(1.0, 2.0)) == 2.0);
    CHECK(mu.ball_indices(o, 1.0).empty());
    CHECK_THROWS_AS(mu.ball_mass(o, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(mu.ball_mass(o, -1.0), std::invalid_argument);
}

TEST_CASE("kd ball mass is bit-identical to the linear scan") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        for (int d : {2, 3}) {
            AtomicMeasure mu = random_cloud(700, d, d - 0.5, seed, seed == 2);
            std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
            std::uniform_real_distribution<double> uni(-0.2, 1.2);
            for (int k = 0; k < 300; ++k) {
                Point x{uni(rng), uni(rng), d == 3 ? uni(rng) : 0.0};
                double r = 0.001 + std::abs(uni(rng));
                CHECK(mu.ball_mass(x, r) == mu.ball_mass_scan(x, r));
            }
            // whole-cloud ball: the cached-total shortcut path
            CHECK(mu.ball_mass({0.5, 0.5, d == 3 ? 0.5 : 0.0}, 100.0) ==
                  mu.ball_mass_scan({0.5, 0.5, d == 3 ? 0.5 : 0.0}, 100.0));
        }
    }
}

TEST_CASE("ball indices: ascending, exact membership, large-result path") {
    AtomicMeasure mu = random_cloud(5000, 2, 1.5, 7);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int k = 0; k < 20; ++k) {
        Point x{uni(rng), uni(rng), 0.0};
        double r = k < 10 ? 0.08 : 2.5;  // small and whole-cloud (> 4096 hits) queries
        auto got = mu.ball_indices(x, r);
        CHECK(std::is_sorted(got.begin(), got.end()));
        std::vector<std::size_t> want;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (dist(mu.atom(i).pos, x) < r) want.push_back(i);
        CHECK(got == want);
    }
}

TEST_CASE("nearest atom distance matches brute force") {
    AtomicMeasure mu = random_cloud(400, 3, 2.5, 5);
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> uni(-0.5, 1.5);
    for (int k = 0; k < 100; ++k) {
        Point x{uni(rng), uni(rng), uni(rng)};
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < mu.size(); ++i) best = std::min(best, dist(mu.atom(i).pos, x));
        CHECK(mu.nearest_atom_dist(x) == doctest::Approx(best).epsilon(1e-15));
    }
}

TEST_CASE("distance profile: hand case with ties") {
    // two atoms at distance 1 from the origin, one at distance 2
    AtomicMeasure mu({2, 1.5}, {{{1.0, 0.0, 0.0}, 0.25},
                                {{0.0, 2.0, 0.0}, 4.0},
                                {{-1.0, 0.0, 0.0}, 0.5}});
    auto p = mu.distance_profile({0.0, 0.0, 0.0});
    REQUIRE(p.dist.size() == 2);
    CHECK(p.dist[0] == 1.0);
    CHECK(p.dist[1] == 2.0);
    CHECK(p.mass[0] == 0.25 + 0.5);  // tie summed in atom-index order
    CHECK(p.mass[1] == 0.25 + 0.5 + 4.0);
    // profile agrees with open-ball masses just above each distance
    CHECK(mu.ball_mass({0.0, 0.0, 0.0}, 1.5) == p.mass[0]);
    CHECK(mu.ball_mass({0.0, 0.0, 0.0}, 3.0) == p.mass[1]);
}

TEST_CASE("distance profile matches a stable-sort oracle") {
    for (std::uint64_t seed : {21u, 22u}) {
        AtomicMeasure mu = random_cloud(900, 2, 1.5, seed, true);
        std::mt19937_64 rng(seed + 100);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        for (int k = 0; k < 10; ++k) {
            Point x{uni(rng), uni(rng), 0.0};
            if (k == 0) x = mu.atom(0).pos;  // distance 0 present
            auto p = mu.distance_profile(x);
            std::vector<std::size_t> ord(mu.size());
            for (std::size_t i = 0; i < ord.size(); ++i) ord[i] = i;
            std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) {
                return dist(mu.atom(a).pos, x) < dist(mu.atom(b).pos, x);
            });
            std::vector<double> dd, mm;
            double cum = 0.0;
            for (std::size_t i = 0; i < ord.size(); ++i) {
                cum += mu.atom(ord[i]).w;
                double r = dist(mu.atom(ord[i]).pos, x);
                if (i + 1 < ord.size() && dist(mu.atom(ord[i + 1]).pos, x) == r) continue;
                dd.push_back(r);
                mm.push_back(cum);
            }
            REQUIRE(p.dist == dd);
            CHECK(p.mass == mm);
            CHECK(std::is_sorted(p.dist.begin(), p.dist.end()));
            CHECK(p.mass.back() == doctest::Approx(mu.total_mass()).epsilon(1e-12));
        }
    }
}

TEST_CASE("cantor generator: counts, weights, frozen geometry") {
    AtomicMeasure m0 = build_cantor_measure(2, 1.5, 0);
    REQUIRE(m0.size() == 1);
    CHECK(m0.atom(0).pos[0] == 0.5);

    AtomicMeasure m2 = build_cantor_measure(2, 1.5, 2);
    REQUIRE(m2.size() == 16);
    CHECK(m2.total_mass() == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t i = 0; i < m2.size(); ++i) CHECK(m2.atom(i).w == 1.0 / 16.0);
    // default ratio 2^(-d/s) = 2^(-4/3)
    const double ell = std::pow(2.0, -4.0 / 3.0);
    CHECK(ell == doctest::Approx(0.3968502629920499).epsilon(1e-15));
    // first atom: lower-left cell of the lower-left cell, at its centre
    CHECK(m2.atom(0).pos[0] == doctest::Approx(ell * ell / 2.0).epsilon(1e-15));
    CHECK(m2.atom(0).pos[1] == doctest::Approx(ell * ell / 2.0).epsilon(1e-15));
    // second atom: the first digit moves it one coarse corner in x
    CHECK(m2.atom(1).pos[0] ==
          doctest::Approx((1.0 - ell) + ell * ell / 2.0).epsilon(1e-15));

    AtomicMeasure m3 = build_cantor_measure(3, 2.5, 2);
    REQUIRE(m3.size() == 64);
    CHECK(m3.atom(0).pos[2] > 0.0);

    // jitter: deterministic per seed, at most 1% of the cell side
    AtomicMeasure j1 = build_cantor_measure(2, 1.5, 3, std::nullopt, 42);
    AtomicMeasure j2 = build_cantor_measure(2, 1.5, 3, std::nullopt, 42);
    AtomicMeasure j3 = build_cantor_measure(2, 1.5, 3, std::nullopt, 43);
    AtomicMeasure base = build_cantor_measure(2, 1.5, 3);
    bool any_diff = false;
    for (std::size_t i = 0; i < j1.size(); ++i) {
        CHECK(j1.atom(i).pos == j2.atom(i).pos);
        if (j1.atom(i).pos != j3.atom(i).pos) any_diff = true;
        CHECK(std::abs(j1.atom(i).pos[0] - base.atom(i).pos[0]) <=
              0.01 * std::pow(ell, 3));
    }
    CHECK(any_diff);

    CHECK_THROWS_AS(build_cantor_measure(2, 1.5, -1), std::invalid_argument);
    CHECK_THROWS_AS(build_cantor_measure(2, 1.5, 2, 0.5), std::invalid_argument);
}

TEST_CASE("rescale measure") {
    AtomicMeasure mu = random_cloud(50, 2, 1.5, 9);
    const double lam = 2.5;
    Point z{0.3, -0.7, 0.0};
    AtomicMeasure nu = rescale_measure(mu, lam, z);
    REQUIRE(nu.size() == mu.size());
    for (std::size_t i = 0; i < mu.size(); ++i) {
        CHECK(nu.atom(i).pos[0] == doctest::Approx(lam * mu.atom(i).pos[0] + z[0]).epsilon(1e-15));
        CHECK(nu.atom(i).w == doctest::Approx(std::pow(lam, 1.5) * mu.atom(i).w).epsilon(1e-15));
    }
    // ball masses transport: nu(B(lam x + z, lam r)) = lam^s mu(B(x, r))
    Point x{0.4, 0.6, 0.0};
    Point xz{lam * x[0] + z[0], lam * x[1] + z[1], 0.0};
    CHECK(nu.ball_mass(xz, lam * 0.3) ==
          doctest::Approx(std::pow(lam, 1.5) * mu.ball_mass(x, 0.3)).epsilon(1e-12));
    CHECK_THROWS_AS(rescale_measure(mu, 0.0, z), std::invalid_argument);
}

TEST_CASE("growth probe sanity") {
    AtomicMeasure mu = build_cantor_measure(2, 1.5, 3);
    auto rep = growth_probe(mu, 200, 1234);
    CHECK(rep.probe_count > 0);
    // an s-regular Cantor measure has a bounded empirical growth constant
    CHECK(rep.c1_empirical > 0.1);
    CHECK(rep.c1_empirical < 100.0);
    CHECK_THROWS_AS(growth_probe(mu, 0, 1), std::invalid_argument);
}
