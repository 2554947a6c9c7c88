#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "rw/measure.hpp"

namespace rw {

struct KernelEval {
    Point value{0.0, 0.0, 0.0};  // mass x length^{-s} per coordinate
    std::int64_t terms_used = 0;
    double error_bound = 0.0;  // certified absolute bound; 0 in direct mode
};

struct TruncationSpec {
    double inner_radius = 0.0;
    double outer_radius = std::numeric_limits<double>::infinity();

    void validate() const;  // inner < outer, inner >= 0
};

struct BallSpec {
    Point center{0.0, 0.0, 0.0};
    double radius = 0.0;
};

// Direct kernel sum over atoms a with inner < |a-x| < outer of
// w_a (a-x)/|a-x|^{1+s}.  Throws SingularityError if an atom sits exactly at x
// and inner_radius == 0.
KernelEval riesz_at(const AtomicMeasure& mu, const Point& x, TruncationSpec trunc = {});

// max over the ball family of |kernel sum over the complement of 2B|; every
// ball must contain x.
double riesz_maximal(const AtomicMeasure& mu, const Point& x,
                     const std::vector<BallSpec>& ball_family);

// Dyadic default family for riesz_maximal: radii 2^k for k in
// [k_lo, k_hi], centers on a grid of 'offsets' steps around x per axis.
std::vector<BallSpec> default_ball_family(const Point& x, int d, int k_lo, int k_hi,
                                          int offsets = 1);

struct VectorAtom {
    Point pos{0.0, 0.0, 0.0};
    Point w{0.0, 0.0, 0.0};  // d-vector weight
};

// R*(nu)(x) = -sum of w_a . (a-x)/|a-x|^{1+s}
double riesz_adjoint_at(const std::vector<VectorAtom>& nu, const AmbientParams& amb,
                        const Point& x);

// Hierarchical (treecode) far-field summation.  A node of radius h at centroid
// distance D is summarized by its mass, mass-weighted centroid, and second
// central moment (the dipole term vanishes exactly at the centroid, the
// quadrupole term is evaluated from the stored moment) when h/D <= theta and
// the certified third-order Taylor remainder
// mass*(1+s)*(3+6(3+s)+(3+s)(5+s))/6 * h^3/(D-h)^{s+3} is within the per-node
// budget tol*mass/D^s; summing budgets over nodes keeps the total below
// tol*(sum of weights)/dist_min^s.
class RieszTree {
  public:
    explicit RieszTree(const AtomicMeasure& mu);

    KernelEval eval(const Point& x, double tol, double theta = 0.3) const;

  private:
    struct Node {
        Point centroid{0.0, 0.0, 0.0};
        double mass = 0.0;
        double radius = 0.0;  // max distance from centroid to an atom of the node
        // second central moment sum w*(y-c)(y-c)^T: xx, xy, xz, yy, yz, zz
        double moment[6] = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        std::uint32_t begin = 0, end = 0;
        std::int32_t left = -1, right = -1;
    };
    std::int32_t build(std::uint32_t begin, std::uint32_t end);

    const AtomicMeasure& mu_;
    std::vector<std::uint32_t> perm_;
    std::vector<Node> nodes_;
    std::int32_t root_ = -1;
};

// Evaluates the full (untruncated) field at each target; the per-target error
// is certified in error_bound, which never exceeds
// (1+theta)^s * tol * total mass / dist_min^s.  Throws SingularityError if a
// target coincides with an atom.
std::vector<KernelEval> riesz_field_fast(const AtomicMeasure& mu,
                                         const std::vector<Point>& targets, double tol,
                                         double theta = 0.3, int threads = 0);

}  // namespace rw
