#include "rw/capacity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "rw/errors.hpp"

namespace rw {

WolffSup wolff_sup(const AtomicMeasure& mu, const Gauge& g,
                   const std::vector<Point>& probes, const ScaleWindow& window) {
    if (probes.empty()) throw std::invalid_argument("wolff_sup: empty probe set");
    WolffSup out;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        double v;
        try {
            v = wolff_potential(mu, probes[i], g, window);
        } catch (const DivergenceError&) {
            out.divergent = true;
            out.worst_probe = i;
            out.value = std::numeric_limits<double>::infinity();
            return out;
        }
        if (v > out.value) {
            out.value = v;
            out.worst_probe = i;
        }
    }
    return out;
}

namespace {

AtomicMeasure scale_weights(const AtomicMeasure& mu, double factor) {
    std::vector<Atom> atoms = mu.atoms();
    for (Atom& a : atoms) a.w *= factor;
    return AtomicMeasure(mu.ambient(), std::move(atoms));
}

Point centroid(const AtomicMeasure& mu) {
    Point c{0.0, 0.0, 0.0};
    for (const Atom& a : mu.atoms()) {
        c[0] += a.w * a.pos[0];
        c[1] += a.w * a.pos[1];
        c[2] += a.w * a.pos[2];
    }
    double m = mu.total_mass();
    if (m > 0.0)
        for (int i = 0; i < 3; ++i) c[i] /= m;
    return c;
}

}  // namespace

CapacityEstimate capacity_lower_bound(const AtomicMeasure& candidate, const Gauge& g,
                                      const ScaleWindow& window,
                                      const std::vector<Point>& extra_probes) {
    if (candidate.size() == 0)
        throw std::invalid_argument("capacity_lower_bound: empty candidate");
    window.validate();
    const double s = candidate.s();

    // maximum principle: pass to 2^-s mu, whose potential off the support is
    // controlled by the on-support bound
    AtomicMeasure base = scale_weights(candidate, std::pow(2.0, -s));
    std::vector<Point> probes;
    probes.reserve(base.size() + extra_probes.size());
    for (const Atom& a : base.atoms()) probes.push_back(a.pos);
    probes.insert(probes.end(), extra_probes.begin(), extra_probes.end());

    double A = wolff_sup(base, g, probes, window).value;

    CapacityEstimate out;
    out.A_used = A;
    if (A <= 1.0) {
        out.witness = base;
        out.value = base.total_mass();
        return out;
    }
    // rescale to an admissible measure: shrink space by M = e^{A/kappa}, scale
    // mass by (1/A)^{1/sigma} M^{-s}
    const double M = std::exp(A / g.kappa());
    const double mass_factor = std::pow(1.0 / A, 1.0 / g.sigma()) * std::pow(M, -s);
    Point c = centroid(base);
    std::vector<Atom> atoms = base.atoms();
    for (Atom& a : atoms) {
        for (int i = 0; i < 3; ++i) a.pos[i] = c[i] + (a.pos[i] - c[i]) / M;
        if (base.d() == 2) a.pos[2] = 0.0;
        a.w *= mass_factor;
    }
    out.witness = AtomicMeasure(base.ambient(), std::move(atoms));
    out.value = out.witness.total_mass();
    return out;
}

MaxPrincipleReport max_principle_check(const AtomicMeasure& mu, const Gauge& g,
                                       const ScaleWindow& window,
                                       const std::vector<Point>& off_support_probes) {
    if (off_support_probes.empty())
        throw std::invalid_argument("max_principle_check: empty probe set");
    MaxPrincipleReport rep;
    std::vector<Point> supp;
    supp.reserve(mu.size());
    for (const Atom& a : mu.atoms()) supp.push_back(a.pos);
    rep.A = wolff_sup(mu, g, supp, window).value;

    AtomicMeasure scaled = scale_weights(mu, std::pow(2.0, -mu.s()));
    WolffSup off = wolff_sup(scaled, g, off_support_probes, window);
    rep.worst_value = off.value;
    rep.worst_probe = off_support_probes[off.worst_probe];
    rep.pass = off.value <= rep.A * (1.0 + 1e-6);
    return rep;
}

double cz_admissibility_proxy(const AtomicMeasure& mu, const std::vector<Point>& grid,
                              const std::vector<double>& trunc_radii) {
    if (grid.empty()) throw std::invalid_argument("cz_admissibility_proxy: empty grid");
    if (trunc_radii.empty())
        throw std::invalid_argument("cz_admissibility_proxy: empty truncation set");
    double best = 0.0;
    const double outer = std::numeric_limits<double>::infinity();
    for (const Point& x : grid)
        for (double inner : trunc_radii) {
            if (!(inner > 0.0))
                throw std::invalid_argument("cz_admissibility_proxy: radii must be positive");
            KernelEval e = riesz_at(mu, x, TruncationSpec{inner, outer});
            double mag = std::sqrt(e.value[0] * e.value[0] + e.value[1] * e.value[1] +
                                   e.value[2] * e.value[2]);
            best = std::max(best, mag);
        }
    return best;
}

CapacityComparison compare_capacities(const AtomicMeasure& natural, const ScaleWindow& window,
                                      const std::vector<Point>& grid,
                                      const std::vector<double>& trunc_radii) {
    CapacityComparison out;
    double proxy = cz_admissibility_proxy(natural, grid, trunc_radii);
    out.gamma_s_proxy = proxy > 0.0 ? natural.total_mass() / proxy
                                    : std::numeric_limits<double>::infinity();
    Gauge g = Gauge::exponential(default_beta(natural.ambient()));
    out.cap_lower = capacity_lower_bound(natural, g, window).value;
    out.ratio = out.cap_lower > 0.0 ? out.gamma_s_proxy / out.cap_lower : 0.0;
    return out;
}

}  // namespace rw
