#pragma once

// Shared fixtures: a family of sparse "core + satellites" measures whose
// hierarchy survives the full construction pipeline.  A heavy core atom is
// surrounded by four light satellite clusters on a ring; each cluster repeats
// the pattern at a much finer scale.  The cores are dense at every scale (they
// land in the empirical exceptional set) while each satellite admits both a
// good dyadic scale (its parent core is nearby) and a low-density halo (its
// own cluster is light), so level k keeps exactly the 4^k satellites.

#include <cmath>
#include <vector>

#include "rw/cantor.hpp"
#include "rw/measure.hpp"

namespace rwtest {

inline constexpr double kFixtureS = 1.5;

// good dyadic scale selected for the level-k satellites: r_1 = 1 and
// r_{k+1} = largest power of two <= eps * rho_k / 4 with rho_1 = r_1/16,
// rho_k = r_k/8 for k >= 2 (eps = 0.05)
inline double level_radius(int k) {
    int e = k <= 1 ? 0 : 11 + 10 * (k - 2);
    return std::ldexp(1.0, -e);
}

// satellite ring radius around the parent core
inline double ring_radius(int k) { return k == 1 ? 0.45 : 0.7 * level_radius(k); }

// total weight of a level-k satellite cluster; light enough that
// mu(B(x, M * rho_k)) <= delta * rho_k^s with M = 4.5, delta = 0.01
inline double cluster_weight(int k) {
    return k == 1 ? 1e-4 : 2e-4 * std::pow(level_radius(k), kFixtureS);
}

inline void emit_cluster(std::vector<rw::Atom>& atoms, const rw::Point& c, int k,
                         int depth) {
    if (k == depth) {
        atoms.push_back({c, cluster_weight(k)});
        return;
    }
    // cluster core first: ties in the greedy cover selections resolve to it
    atoms.push_back({c, cluster_weight(k) - 4.0 * cluster_weight(k + 1)});
    const double a = ring_radius(k + 1);
    const double dx[4] = {-1.0, 1.0, 0.0, 0.0};
    const double dy[4] = {0.0, 0.0, -1.0, 1.0};
    for (int i = 0; i < 4; ++i)
        emit_cluster(atoms, {c[0] + a * dx[i], c[1] + a * dy[i], 0.0}, k + 1, depth);
}

// d = 2, s = 3/2 measure with 'depth' satellite generations; atom 0 is the
// root core of weight 1/2
inline rw::AtomicMeasure satellite_measure(int depth) {
    std::vector<rw::Atom> atoms;
    atoms.push_back({{0.5, 0.5, 0.0}, 0.5});
    const double a = ring_radius(1);
    const double dx[4] = {-1.0, 1.0, 0.0, 0.0};
    const double dy[4] = {0.0, 0.0, -1.0, 1.0};
    for (int i = 0; i < 4; ++i)
        emit_cluster(atoms, {0.5 + a * dx[i], 0.5 + a * dy[i], 0.0}, 1, depth);
    return rw::AtomicMeasure({2, kFixtureS}, std::move(atoms));
}

// construction parameters under which satellite_measure(N) yields a complete
// N-level tree with 4^N single-atom final cells
inline rw::CantorParams satellite_params(int N) {
    rw::CantorParams p;
    p.N = N;
    p.eps = 0.05;
    p.M = 4.5;
    p.delta = 0.01;
    p.Delta = 0.25;
    p.q = 12;
    p.gamma = N == 1 ? 1e-3 : (N == 2 ? 1e-7 : 1e-11);
    return p;
}

}  // namespace rwtest
