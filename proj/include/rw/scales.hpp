#pragma once

#include <cstddef>
#include <vector>

#include "rw/measure.hpp"

namespace rw {

struct ScaleWindow {
    double r_min = 0.0;
    double r_max = 0.0;

    void validate() const;  // 0 <= r_min < r_max
};

// E(x,Delta) = {r : mu(B(x,r))/r^s > Delta} as a finite union of intervals
// [lo, hi), with log-measure sum of log(hi/lo).
struct ScaleSet {
    std::vector<std::pair<double, double>> intervals;  // sorted, disjoint
    double log_measure = 0.0;
};

ScaleSet superlevel_scale_set(const AtomicMeasure& mu, const Point& x, double Delta,
                              const ScaleWindow& window);

struct GoodScaleReport {
    std::vector<int> ks;
    int count = 0;
};

// k in [0, k_max] with mu(B(x,2^-k)) > (Delta/2^s) * 2^{-sk}, strict.
GoodScaleReport good_scales(const AtomicMeasure& mu, const Point& x, double Delta,
                            int k_max);

struct WeakTypePoint {
    double T = 0.0;
    double mass_above = 0.0;
};

struct WeakTypeCurve {
    std::vector<WeakTypePoint> points;
    std::vector<double> atom_log_measures;  // L per atom, atom-index order
    double alpha_hat = 0.0;                 // fitted decay exponent (report only)
};

WeakTypeCurve weak_type_statistic(const AtomicMeasure& mu, double Delta,
                                  const std::vector<double>& Ts, const ScaleWindow& window,
                                  int threads = 0);

struct ExceptionalSetReport {
    std::vector<std::size_t> member_atoms;  // ascending atom index
    double mass_fraction = 0.0;
};

// Atoms x in (1/2)B0 with mu(B(x,r))/r^s > delta for ALL r in [r0/2^q, r0/4].
ExceptionalSetReport exceptional_set(const AtomicMeasure& mu, const Point& b0_center,
                                     double r0, double delta, int q);

}  // namespace rw
