#include "rw/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rw {

namespace {

inline Point kernel(const Point& b, const Point& x, double s) {
    double dx = b[0] - x[0], dy = b[1] - x[1], dz = b[2] - x[2];
    double r = std::sqrt(dx * dx + dy * dy + dz * dz);
    double f = 1.0 / std::pow(r, 1.0 + s);
    return {f * dx, f * dy, f * dz};
}

inline double ball2_volume(int d) {
    return d == 2 ? 4.0 * std::numbers::pi : 32.0 * std::numbers::pi / 3.0;
}

}  // namespace

double PsiSpec::profile(double t) {
    if (t <= 1.0) return 1.0;
    if (t >= 2.0) return 0.0;
    double u = t - 1.0;
    return 1.0 - u * u * u * (10.0 + u * (-15.0 + 6.0 * u));  // quintic smoothstep
}

double PsiSpec::profile_grad(double t) {
    if (t <= 1.0 || t >= 2.0) return 0.0;
    double u = t - 1.0;
    return -30.0 * u * u * (1.0 - u) * (1.0 - u);
}

double PsiSpec::bump_scale(int d) const {
    // vol(B(0,2)) / int g(|x|) dx, both in closed form: the radial integrals of
    // the quintic profile are 8/7 (d=2) and 33/28 (d=3)
    if (d == 2) return 7.0 / 4.0;
    return 224.0 / 99.0;
}

TopGroups top_groups(const CantorTree& tree) {
    TopGroups out;
    std::vector<TopCoverBall> all;
    for (const auto& cover : tree.covers) all.insert(all.end(), cover.begin(), cover.end());
    // maximal balls under containment: T_j inside T_i iff |z_j - z_i| + 4 r_j <= 4 r_i
    for (std::size_t j = 0; j < all.size(); ++j) {
        bool maximal = true;
        for (std::size_t i = 0; i < all.size() && maximal; ++i) {
            if (i == j) continue;
            bool contained = dist(all[j].z, all[i].z) + 4.0 * all[j].r <= 4.0 * all[i].r;
            // strict containment, or equal balls resolved toward the lower index
            if (contained && (all[j].r < all[i].r || (all[j].r == all[i].r && i < j)))
                maximal = false;
        }
        if (maximal) out.balls.push_back(all[j]);
    }
    out.masses.assign(out.balls.size(), 0.0);

    const AtomicMeasure& mu = *tree.mu;
    for (const Cell& c : tree.levels.back()) {
        double m = 0.0;
        for (std::size_t a : c.atoms) m += mu.atom(a).w;
        std::size_t pick = out.balls.size();
        for (std::size_t j = 0; j < out.balls.size(); ++j)
            if (dist(c.bottom.center, out.balls[j].z) < 4.0 * out.balls[j].r) {
                pick = j;
                break;
            }
        if (pick == out.balls.size()) {
            // no maximal ball contains the cell center; fall back to the closest
            double best = 1e300;
            for (std::size_t j = 0; j < out.balls.size(); ++j) {
                double excess = dist(c.bottom.center, out.balls[j].z) - 4.0 * out.balls[j].r;
                if (excess < best) { best = excess; pick = j; }
            }
        }
        out.masses[pick] += m;
    }
    return out;
}

Point partial_riesz(const CantorTree& tree, std::size_t support_index, int k) {
    if (support_index >= tree.support.size())
        throw std::invalid_argument("partial_riesz: support index out of range");
    int N = static_cast<int>(tree.levels.size()) - 1;
    if (k < 0 || k >= N) throw std::invalid_argument("partial_riesz: level out of range");
    const AtomicMeasure& mu = *tree.mu;
    std::size_t a = tree.support[support_index];
    int cell = tree.final_cell_of_atom(a);
    const auto& outer = tree.levels[static_cast<std::size_t>(k)]
                                   [static_cast<std::size_t>(tree.ancestor(cell, k))];
    const auto& inner = tree.levels[static_cast<std::size_t>(k + 1)]
                                   [static_cast<std::size_t>(tree.ancestor(cell, k + 1))];
    const Point& x = mu.atom(a).pos;
    Point acc{0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < tree.support.size(); ++i) {
        std::size_t b = tree.support[i];
        if (!std::binary_search(outer.atoms.begin(), outer.atoms.end(), b)) continue;
        if (std::binary_search(inner.atoms.begin(), inner.atoms.end(), b)) continue;
        Point kv = kernel(mu.atom(b).pos, x, mu.s());
        double w = tree.mu_prime_w[i];
        acc[0] += w * kv[0];
        acc[1] += w * kv[1];
        acc[2] += w * kv[2];
    }
    return acc;
}

MeanZeroResult mean_zero_check(const CantorTree& tree, int k, int j,
                               const std::vector<std::size_t>* perm) {
    int N = static_cast<int>(tree.levels.size()) - 1;
    if (k < 0 || k >= N) throw std::invalid_argument("mean_zero_check: level out of range");
    if (j < 0 || j >= static_cast<int>(tree.levels[static_cast<std::size_t>(k)].size()))
        throw std::invalid_argument("mean_zero_check: cell out of range");
    const AtomicMeasure& mu = *tree.mu;
    const Cell& cell = tree.levels[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];

    // support atoms of the cell, with their level-N cell for the pair filter
    std::vector<std::size_t> members;      // indices into tree.support
    for (std::size_t i = 0; i < tree.support.size(); ++i)
        if (std::binary_search(cell.atoms.begin(), cell.atoms.end(), tree.support[i]))
            members.push_back(i);
    std::vector<int> fin(members.size());
    for (std::size_t m = 0; m < members.size(); ++m)
        fin[m] = tree.final_cell_of_atom(tree.support[members[m]]);

    std::vector<std::size_t> order(members.size());
    for (std::size_t m = 0; m < order.size(); ++m) order[m] = m;
    if (perm) {
        if (perm->size() != members.size())
            throw std::invalid_argument("mean_zero_check: permutation size mismatch");
        order = *perm;
    }

    MeanZeroResult out;
    for (std::size_t oi : order) {
        std::size_t i = members.at(oi);
        const Point& x = mu.atom(tree.support[i]).pos;
        double wx = tree.mu_prime_w[i];
        for (std::size_t om = 0; om < members.size(); ++om) {
            if (fin[om] == fin[oi]) continue;  // same bottom cell: not in the tail sum
            std::size_t b = members[om];
            Point kv = kernel(mu.atom(tree.support[b]).pos, x, mu.s());
            double wb = tree.mu_prime_w[b];
            out.residual[0] += wx * wb * kv[0];
            out.residual[1] += wx * wb * kv[1];
            out.residual[2] += wx * wb * kv[2];
            out.pair_scale += wx * wb *
                std::sqrt(kv[0] * kv[0] + kv[1] * kv[1] + kv[2] * kv[2]);
        }
    }
    return out;
}

HarnessReport level_energies(const CantorTree& tree) {
    const AtomicMeasure& mu = *tree.mu;
    const int N = static_cast<int>(tree.levels.size()) - 1;
    const std::size_t n = tree.support.size();
    HarnessReport rep;
    rep.mu_prime_mass = tree.mu_prime_mass();

    // R^(k)(x) for every support atom and level
    std::vector<std::vector<Point>> R(static_cast<std::size_t>(std::max(N, 0)),
                                      std::vector<Point>(n, Point{0.0, 0.0, 0.0}));
    for (std::size_t i = 0; i < n; ++i)
        for (int k = 0; k < N; ++k) R[static_cast<std::size_t>(k)][i] = partial_riesz(tree, i, k);

    rep.level_energy.assign(static_cast<std::size_t>(std::max(N, 0)), 0.0);
    rep.cross.assign(static_cast<std::size_t>(std::max(N, 0)), {});
    for (int k = 0; k < N; ++k)
        rep.cross[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(N - k - 1), 0.0);

    double sum_terms = 0.0, cross_terms = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double w = tree.mu_prime_w[i];
        Point total{0.0, 0.0, 0.0};
        for (int k = 0; k < N; ++k) {
            const Point& v = R[static_cast<std::size_t>(k)][i];
            rep.level_energy[static_cast<std::size_t>(k)] +=
                w * (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
            total[0] += v[0];
            total[1] += v[1];
            total[2] += v[2];
            for (int l = k + 1; l < N; ++l) {
                const Point& u = R[static_cast<std::size_t>(l)][i];
                rep.cross[static_cast<std::size_t>(k)][static_cast<std::size_t>(l - k - 1)] +=
                    w * (v[0] * u[0] + v[1] * u[1] + v[2] * u[2]);
            }
        }
        rep.total_energy += w * (total[0] * total[0] + total[1] * total[1] + total[2] * total[2]);
    }
    for (double e : rep.level_energy) sum_terms += e;
    for (const auto& row : rep.cross)
        for (double c : row) cross_terms += c;
    rep.bilinear_residual = std::abs(rep.total_energy - (sum_terms + 2.0 * cross_terms)) /
                            std::max(std::abs(rep.total_energy), 1e-300);

    TopGroups groups = top_groups(tree);
    rep.psi_integral = psi_integral(tree, groups, PsiSpec{});
    for (double A : {2.0, 4.0, 8.0, 16.0}) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double g = g_function_eval(tree, groups, mu.atom(tree.support[i]).pos, A);
            e += tree.mu_prime_w[i] * g * g;
        }
        rep.g_energy.push_back(e);
    }
    return rep;
}

double psi_eval(const CantorTree& tree, const TopGroups& groups, const Point& x,
                const PsiSpec& spec) {
    const int d = tree.mu->d();
    const double s = tree.mu->s();
    const double c = spec.bump_scale(d);
    const double vol2 = ball2_volume(d);
    double out = 0.0;
    for (std::size_t j = 0; j < groups.balls.size(); ++j) {
        double r = dist(x, groups.balls[j].z);
        for (int k = 2; k <= spec.k_max; ++k) {
            double R = std::ldexp(groups.balls[j].r, k);
            if (r >= 2.0 * R) continue;
            // unit-integral bump phi(.|/R) / (R^d vol(B(0,2)))
            double phi = c * PsiSpec::profile(r / R) / (std::pow(R, d) * vol2);
            out += std::pow(2.0, k * (s - d)) * groups.masses[j] * phi;
        }
    }
    return out;
}

double psi_integral(const CantorTree& tree, const TopGroups& groups, const PsiSpec& spec) {
    const int d = tree.mu->d();
    const double s = tree.mu->s();
    double total_mass = 0.0;
    for (double m : groups.masses) total_mass += m;
    double geom = 0.0;
    for (int k = 2; k <= spec.k_max; ++k) geom += std::pow(2.0, k * (s - d));
    return geom * total_mass;
}

double g_function_eval(const CantorTree& tree, const TopGroups& groups, const Point& x,
                       double A) {
    if (!(A > 0.0)) throw std::invalid_argument("g_function_eval: A must be positive");
    const double s = tree.mu->s();
    double out = 0.0;
    for (std::size_t j = 0; j < groups.balls.size(); ++j) {
        if (dist(x, groups.balls[j].z) >= 4.0 * A * groups.balls[j].r) continue;
        out += groups.masses[j] / std::pow(A * groups.balls[j].r, s);
    }
    return out;
}

}  // namespace rw
