#pragma once

#include <cstddef>
#include <vector>

#include "rw/gauges.hpp"
#include "rw/measure.hpp"
#include "rw/riesz.hpp"
#include "rw/scales.hpp"

namespace rw {

struct WolffSup {
    double value = 0.0;
    std::size_t worst_probe = 0;
    bool divergent = false;
};

WolffSup wolff_sup(const AtomicMeasure& mu, const Gauge& g,
                   const std::vector<Point>& probes, const ScaleWindow& window);

struct CapacityEstimate {
    double value = 0.0;            // capacity lower bound
    AtomicMeasure witness;         // admissible witness measure (potential <= 1 on probes)
    double A_used = 0.0;           // potential bound of the candidate on its support probes
};

// Probes = candidate support + halo ring grid.  Applies the maximum principle
// (weights scaled by 2^-s) and, when the support bound A exceeds 1, the
// admissible rescaling to level 1: spatial shrink by M = e^{A/kappa} with mass
// factor (1/A)^{1/sigma} * M^{-s}.
CapacityEstimate capacity_lower_bound(const AtomicMeasure& candidate, const Gauge& g,
                                      const ScaleWindow& window,
                                      const std::vector<Point>& extra_probes = {});

struct MaxPrincipleReport {
    bool pass = true;
    double A = 0.0;            // sup of W(mu) over support probes
    double worst_value = 0.0;  // sup of W(2^-s mu) over off-support probes
    Point worst_probe{0.0, 0.0, 0.0};
};

MaxPrincipleReport max_principle_check(const AtomicMeasure& mu, const Gauge& g,
                                       const ScaleWindow& window,
                                       const std::vector<Point>& off_support_probes);

// max over grid points and inner truncation radii of |riesz_at|; the measure
// is proxy-admissible at tolerance tau when this is <= 1 + tau.
double cz_admissibility_proxy(const AtomicMeasure& mu, const std::vector<Point>& grid,
                              const std::vector<double>& trunc_radii);

struct CapacityComparison {
    double gamma_s_proxy = 0.0;   // largest c with c * natural measure proxy-admissible
    double cap_lower = 0.0;       // exponential-gauge capacity lower bound
    double ratio = 0.0;           // gamma_s_proxy / cap_lower (report only)
};

CapacityComparison compare_capacities(const AtomicMeasure& natural, const ScaleWindow& window,
                                      const std::vector<Point>& grid,
                                      const std::vector<double>& trunc_radii);

}  // namespace rw
