#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace rw {

// Ambient space: dimension d in {2,3} and fractional dimension s in (d-1,d).
struct AmbientParams {
    int d = 2;
    double s = 1.5;

    void validate() const;  // throws std::invalid_argument on violation
};

// Points live in R^3 with the z coordinate fixed to 0 when d == 2.
using Point = std::array<double, 3>;

double dist(const Point& a, const Point& b);
double dist2(const Point& a, const Point& b);
bool finite_point(const Point& p);

struct Atom {
    Point pos{0.0, 0.0, 0.0};
    double w = 0.0;
};

struct GrowthReport {
    double c1_empirical = 0.0;
    std::int64_t probe_count = 0;
};

// Finite atomic measure with a kd-tree ball index.  Immutable after
// construction; all queries are safe for concurrent readers.
class AtomicMeasure {
  public:
    AtomicMeasure() = default;  // empty measure
    AtomicMeasure(AmbientParams amb, std::vector<Atom> atoms);

    const AmbientParams& ambient() const { return amb_; }
    int d() const { return amb_.d; }
    double s() const { return amb_.s; }
    std::size_t size() const { return atoms_.size(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    const Atom& atom(std::size_t i) const { return atoms_[i]; }
    double total_mass() const { return total_mass_; }

    // Open-ball mass |a-x| < r via the index; bit-identical to ball_mass_scan.
    double ball_mass(const Point& x, double r) const;
    // Linear-scan oracle, fixed atom-index summation order.
    double ball_mass_scan(const Point& x, double r) const;
    // Indices of atoms with |a-x| < r, ascending.
    std::vector<std::size_t> ball_indices(const Point& x, double r) const;
    // Distance to the nearest atom (infinity for the empty measure).
    double nearest_atom_dist(const Point& x) const;
    // Sorted distances from x to every atom, paired with the open-ball mass
    // just above each distance (cumulative weight in ascending-distance order,
    // ties summed in atom-index order).
    struct DistanceProfile {
        std::vector<double> dist;  // strictly increasing distinct distances
        std::vector<double> mass;  // mass[i] = mu(B(x,r)) for r in (dist[i], dist[i+1]]
    };
    DistanceProfile distance_profile(const Point& x) const;
    // reuse-friendly variant: clears and refills 'out', keeping its capacity
    void distance_profile(const Point& x, DistanceProfile& out) const;
    // truncated variant: stops after the first entry whose cumulative mass
    // reaches mass_cap and returns true; the prefix is bit-identical to the
    // full profile except that the final mass entry may omit atoms merged in
    // by square-root rounding collisions.  Returns false (full profile) when
    // the cap is never reached.
    bool distance_profile_capped(const Point& x, double mass_cap,
                                 DistanceProfile& out) const;

  private:
    struct Node {
        Point lo, hi;       // bounding box
        std::uint32_t begin = 0, end = 0;  // range into perm_
        std::int32_t left = -1, right = -1;
        double weight = 0.0;  // subtree mass
    };
    void build_tree();
    std::int32_t build_node(std::uint32_t begin, std::uint32_t end);

    AmbientParams amb_;
    std::vector<Atom> atoms_;
    std::vector<double> weights_;  // flat copy of atom weights, index order
    std::vector<double> px_, py_, pz_;  // flat coordinates, index order
    double total_mass_ = 0.0;
    std::vector<std::uint32_t> perm_;  // atom indices, kd-partitioned
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

// Cantor-type product test measure: 2^(d*depth) equal-mass atoms at the
// centers of the depth-level corner cells of the unit cube.  Default ratio
// 2^(-d/s).  jitter_seed, when present, perturbs each center by at most 1% of
// its cell side, deterministically.
AtomicMeasure build_cantor_measure(int d, double s, int depth,
                                   std::optional<double> ratio = std::nullopt,
                                   std::optional<std::uint64_t> jitter_seed = std::nullopt);

// a -> lambda*a + z, weights scaled by lambda^s.
AtomicMeasure rescale_measure(const AtomicMeasure& mu, double lambda, const Point& z);

// Empirical growth constant sup mu(B(x,r))/r^s over probed (x,r).
GrowthReport growth_probe(const AtomicMeasure& mu, int sample_count, std::uint64_t rng_seed);

}  // namespace rw
