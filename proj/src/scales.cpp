#include "rw/scales.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "rw/errors.hpp"

namespace rw {

void ScaleWindow::validate() const {
    if (!(r_min >= 0.0) || !std::isfinite(r_min))
        throw std::invalid_argument("r_min must be finite and >= 0");
    if (!(r_min < r_max)) throw std::invalid_argument("r_min must be < r_max");
}

ScaleSet superlevel_scale_set(const AtomicMeasure& mu, const Point& x, double Delta,
                              const ScaleWindow& window) {
    window.validate();
    if (!(Delta > 0.0)) throw std::invalid_argument("Delta must be positive");
    const double s = mu.s();
    ScaleSet out;
    if (mu.size() == 0) return out;

    // once the cumulative mass reaches Delta * r_max^s the cut radius stays
    // >= r_max, so the remaining (larger) distances form one dense run up to
    // the window edge and never need sorting
    thread_local AtomicMeasure::DistanceProfile prof;
    const bool capped =
        mu.distance_profile_capped(x, Delta * std::pow(window.r_max, s), prof);
    const std::size_t n = prof.dist.size();
    const double inf = std::numeric_limits<double>::infinity();

    // raw intervals of {r : mass(r)/r^s > Delta}, before window clamping
    std::vector<std::pair<double, double>> raw;
    double t_last = 0.0;  // cut radius is nondecreasing in the cumulative mass
    for (std::size_t i = 0; i < n; ++i) {
        double lo = prof.dist[i];
        double hi = (i + 1 < n) ? prof.dist[i + 1] : inf;
        double cut;
        if (hi <= t_last) {
            cut = hi;  // t >= t_last >= hi, interval fully dense
        } else {
            t_last = std::pow(prof.mass[i] / Delta, 1.0 / s);  // density > Delta iff r < t
            if (capped && i + 1 == n) t_last = std::max(t_last, window.r_max);
            cut = std::min(hi, t_last);
        }
        if (cut > lo) {
            if (!raw.empty() && raw.back().second == lo)
                raw.back().second = cut;  // merge touching intervals
            else
                raw.emplace_back(lo, cut);
        }
    }

    for (auto [lo, hi] : raw) {
        lo = std::max(lo, window.r_min);
        hi = std::min(hi, window.r_max);
        if (!(hi > lo)) continue;
        if (lo == 0.0)
            throw DivergenceError(
                "superlevel_scale_set: infinite log-measure (atom at x, r_min = 0)");
        out.intervals.emplace_back(lo, hi);
        out.log_measure += std::log(hi / lo);
    }
    return out;
}

GoodScaleReport good_scales(const AtomicMeasure& mu, const Point& x, double Delta,
                            int k_max) {
    if (k_max < 0) throw std::invalid_argument("k_max must be >= 0");
    if (!(Delta > 0.0)) throw std::invalid_argument("Delta must be positive");
    const double s = mu.s();
    GoodScaleReport rep;
    const double thresh_factor = Delta / std::pow(2.0, s);
    for (int k = 0; k <= k_max; ++k) {
        double r = std::ldexp(1.0, -k);
        if (mu.ball_mass(x, r) > thresh_factor * std::pow(r, s)) rep.ks.push_back(k);
    }
    rep.count = static_cast<int>(rep.ks.size());
    return rep;
}

WeakTypeCurve weak_type_statistic(const AtomicMeasure& mu, double Delta,
                                  const std::vector<double>& Ts, const ScaleWindow& window,
                                  int threads) {
    if (Ts.empty()) throw std::invalid_argument("Ts must be nonempty");
    window.validate();
    if (!(window.r_min > 0.0))
        throw std::invalid_argument("weak_type_statistic requires r_min > 0");
    WeakTypeCurve curve;
    curve.atom_log_measures.resize(mu.size());

    int nthreads = threads > 0 ? threads
                               : static_cast<int>(std::thread::hardware_concurrency());
    nthreads = std::max(1, std::min<int>(nthreads, static_cast<int>(mu.size() ? mu.size() : 1)));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= mu.size()) break;
            curve.atom_log_measures[i] =
                superlevel_scale_set(mu, mu.atom(i).pos, Delta, window).log_measure;
        }
    };
    if (nthreads == 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }

    for (double T : Ts) {
        double mass = 0.0;
        for (std::size_t i = 0; i < mu.size(); ++i)
            if (curve.atom_log_measures[i] > T) mass += mu.atom(i).w;
        curve.points.push_back({T, mass});
    }

    // least squares of log(mass_above) on log log T (points with T > 1, mass > 0)
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& p : curve.points) {
        if (!(p.T > 1.0) || !(p.mass_above > 0.0)) continue;
        double X = std::log(std::log(p.T));
        double Y = std::log(p.mass_above);
        sx += X; sy += Y; sxx += X * X; sxy += X * Y;
        ++m;
    }
    if (m >= 2 && sxx * m - sx * sx > 0.0)
        curve.alpha_hat = -(m * sxy - sx * sy) / (m * sxx - sx * sx);
    return curve;
}

ExceptionalSetReport exceptional_set(const AtomicMeasure& mu, const Point& b0_center,
                                     double r0, double delta, int q) {
    if (!(r0 > 0.0)) throw std::invalid_argument("r0 must be positive");
    if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
    if (q < 3) throw std::invalid_argument("q must be >= 3 for a nonempty radius range");
    const double s = mu.s();
    const double a = r0 * std::ldexp(1.0, -q);
    const double b = r0 / 4.0;

    double b0_mass = mu.ball_mass(b0_center, r0);
    if (b0_mass == 0.0)
        throw UndefinedFractionError("exceptional_set: mu(B0) = 0");

    ExceptionalSetReport rep;
    double member_mass = 0.0;
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const Point& x = mu.atom(i).pos;
        if (!(dist(x, b0_center) < r0 / 2.0)) continue;
        // density r -> mu(B(x,r))/r^s is decreasing between jump radii, so the
        // infimum over [a,b] is attained at a, b, or a jump radius in (a,b]
        auto prof = mu.distance_profile(x);
        bool member = mu.ball_mass_scan(x, b) > delta * std::pow(b, s);
        for (std::size_t k = 0; k < prof.dist.size() && member; ++k) {
            double r = prof.dist[k];
            if (r > a && r <= b && !(mu.ball_mass_scan(x, r) > delta * std::pow(r, s)))
                member = false;
        }
        if (member) {
            rep.member_atoms.push_back(i);
            member_mass += mu.atom(i).w;
        }
    }
    rep.mass_fraction = member_mass / b0_mass;
    return rep;
}

}  // namespace rw
