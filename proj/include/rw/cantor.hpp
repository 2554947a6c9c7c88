#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rw/measure.hpp"

namespace rw {

struct CantorParams {
    int N = 1;             // levels
    double eps = 0.01;     // separation parameter, (0, 1/2], with (1-3eps)^s > 1/2
    double M = 8.0;        // low-density halo factor, > 4
    double delta = 1e-3;   // density threshold, < Delta/2^{s+1}
    double Delta = 0.25;   // good-scale threshold
    double gamma = 0.5;    // retained-mass fraction target
    int q = 12;            // low-density dyadic search depth
    int k_cap = 10000;     // annulus-shrinking iteration cap

    void validate(double s) const;
};

struct Ball {
    Point center{0.0, 0.0, 0.0};
    double radius = 0.0;
};

struct TopCoverBall {
    Point z{0.0, 0.0, 0.0};
    double r = 0.0;               // selected good scale; T_j = B(z, 4r)
    std::size_t atom_index = 0;   // the atom the ball was grown at
};

// One cell of the hierarchy.  The atom list is the core (the B~ region);
// the surrounding cell region is the closed eps*rho halo around it.
struct Cell {
    int level = 0;
    std::vector<std::size_t> atoms;    // core atoms, ascending mu-atom index
    std::vector<std::size_t> etilde;   // retained compact subset, subset of atoms
    Ball bottom;                       // generating ball B_j = (x_j, rho_j)
    double halo = 0.0;                 // eps * rho_j
    int parent = -1;                   // index into previous level's cell list
    int top_index = -1;                // associated top-cover ball (parent level)
};

struct LevelReport {
    std::vector<TopCoverBall> top_cover;
    double top_mass_ratio = 0.0;       // sum_j mu(T_j) / mu(halo of the triple)
    double mass_before = 0.0;          // mu(E~)
    double mass_after = 0.0;           // mu(union of children's E~_j)
    std::size_t exceptional_count = 0; // atoms sent to F
    int besicovitch_max_multiplicity = 0;  // grid-probed, report only
};

struct CantorTree {
    const AtomicMeasure* mu = nullptr;
    CantorParams params;
    std::vector<std::vector<Cell>> levels;       // levels[k] = cells of level k; levels[0] has the root
    std::vector<std::vector<TopCoverBall>> covers;  // covers[k] = top cover built inside level-k cells
    std::vector<LevelReport> reports;            // one per built level
    std::vector<std::size_t> support;            // mu' support: ascending atom indices (union of level-N cells)
    std::vector<double> mu_prime_w;              // weights of mu' on 'support'
    double retained_fraction = 0.0;              // mu'(R^d) / mu(R^d)

    double mu_prime_mass() const;
    // level-k ancestor cell index of the level-N cell 'cell'
    int ancestor(int cell, int k) const;
    // level-N cell containing mu-atom 'a', or -1
    int final_cell_of_atom(std::size_t a) const;
};

struct AdmissibleTriple {
    std::vector<std::size_t> omega_atoms;   // cell core atoms
    std::vector<std::size_t> etilde_atoms;  // retained subset
    Ball ball;                              // enclosing ball B, radius rho
    double halo = 0.0;                      // eps * rho
    int level = 0;
};

// Vitali top cover over the good-scale balls of the E~ atoms.
// good_scale_budget bounds how many dyadic scales below eps*rho/4 are probed.
std::vector<TopCoverBall> build_top_cover(const AtomicMeasure& mu,
                                          const AdmissibleTriple& triple, double Delta,
                                          double eps, int good_scale_budget);

// Largest t = 2^-l * r_j, l in [0,q], with mu(B(x,Mt)) <= delta t^s and
// dist(B(x,Mt), boundary of T_j) >= r_j.  nullopt -> x joins the empirical
// exceptional set F.
std::optional<double> find_low_density_scale(const AtomicMeasure& mu, const Point& x,
                                             const TopCoverBall& top, double M,
                                             double delta, int q);

// rho(x) = (1-3eps)^k t_x for the least k whose annulus is light:
// mu(B(x,l_k t)\B(x,l_{k+1} t)) <= 3*d*eps*mu(B(x,l_k t)).
double shrink_to_stable_radius(const AtomicMeasure& mu, const Point& x, double t_x,
                               double eps, int d, int k_cap);

// Besicovitch greedy selection: largest-radius candidate whose center is not
// in any selected (open) ball; ties -> lowest atom index.
struct BesicovitchCandidate {
    std::size_t atom_index = 0;
    Point x{0.0, 0.0, 0.0};
    double rho = 0.0;
};
std::vector<BesicovitchCandidate> build_bottom_cover(
    const std::vector<BesicovitchCandidate>& candidates);

struct BuildLevelResult {
    std::vector<AdmissibleTriple> children;
    std::vector<Cell> cells;
    std::vector<TopCoverBall> top_cover;
    LevelReport report;
};

BuildLevelResult build_level(const AtomicMeasure& mu, const AdmissibleTriple& triple,
                             const CantorParams& params, int good_scale_budget);

// E_atoms empty -> use every atom of mu.
CantorTree build_cantor_tree(const AtomicMeasure& mu,
                             const std::vector<std::size_t>& E_atoms,
                             const CantorParams& params);

struct VerifyProperty {
    std::string name;
    bool pass = true;
    std::string witness;
};

struct VerifyReport {
    std::vector<VerifyProperty> properties;
    bool all_pass = true;
};

VerifyReport verify_construction(const CantorTree& tree);

}  // namespace rw
