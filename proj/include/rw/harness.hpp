#pragma once

#include <cstddef>
#include <vector>

#include "rw/cantor.hpp"
#include "rw/measure.hpp"

namespace rw {

// Radial bump profile phi(x) = c * g(|x|): g = 1 on [0,1], quintic smoothstep
// down to 0 on [1,2], c chosen so the integral of phi over R^d equals the
// volume of B(0,2).  Then phi >= 1 on B(0,1) and phi <= 2^d.
struct PsiSpec {
    int k_max = 40;

    static double profile(double t);        // g
    static double profile_grad(double t);   // g'
    double bump_scale(int d) const;         // c = vol(B(0,2)) / int g(|x|) dx
};

// Disjoint grouping of all top-cover balls: J = maximal balls under geometric
// containment; each level-N cell's mu' mass is assigned to the lowest-index
// maximal ball containing it.
struct TopGroups {
    std::vector<TopCoverBall> balls;  // the maximal balls, selection order
    std::vector<double> masses;       // mu'(T~_j) per maximal ball
};

TopGroups top_groups(const CantorTree& tree);

// R^(k)(mu')(x): kernel sum over mu' atoms in the level-k cell of x minus its
// level-(k+1) cell.  x is given as an index into tree.support.
Point partial_riesz(const CantorTree& tree, std::size_t support_index, int k);

// Integral over the cell of the tail sum of partial transforms; exactly zero
// in exact arithmetic (antisymmetric kernel over a symmetric pair set).
// 'perm' optionally reorders the pair summation (stability probe); it must be
// a permutation of the cell's support indices.
struct MeanZeroResult {
    Point residual{0.0, 0.0, 0.0};
    double pair_scale = 0.0;  // sum over pairs of |kernel| * weights (for relative residual)
};
MeanZeroResult mean_zero_check(const CantorTree& tree, int k, int j,
                               const std::vector<std::size_t>* perm = nullptr);

struct HarnessReport {
    std::vector<double> level_energy;                  // int |R^(k)|^2 dmu'
    std::vector<std::vector<double>> cross;            // cross[k][j-k-1] = int (R^k . R^j) dmu'
    double total_energy = 0.0;                         // int |sum_k R^(k)|^2 dmu'
    double bilinear_residual = 0.0;                    // |total - (sum + 2 cross)| / max(|total|,1e-300)
    double psi_integral = 0.0;
    std::vector<double> g_energy;                      // int g_A^2 dmu' for A in {2,4,8,16}
    double mu_prime_mass = 0.0;
};

HarnessReport level_energies(const CantorTree& tree);

double psi_eval(const CantorTree& tree, const TopGroups& groups, const Point& x,
                const PsiSpec& spec);
// Closed form: sum_{k=2}^{k_max} 2^{k(s-d)} * sum_j mu'(T~_j).
double psi_integral(const CantorTree& tree, const TopGroups& groups, const PsiSpec& spec);

double g_function_eval(const CantorTree& tree, const TopGroups& groups, const Point& x,
                       double A);

}  // namespace rw
