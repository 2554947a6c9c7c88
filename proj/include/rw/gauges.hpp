#pragma once

#include <string>

#include "rw/measure.hpp"
#include "rw/scales.hpp"

namespace rw {

// Potential gauge Phi with admissibility witnesses (sigma, kappa):
// Phi(0)=0, Phi continuous strictly increasing, Phi(t)/t^sigma nondecreasing
// on (0, kappa].
class Gauge {
  public:
    enum class Kind { Power, Exponential, SmoothV, Indicator };

    static Gauge power(double p);              // t^p,    sigma=min(p,1), kappa=1
    static Gauge exponential(double beta);     // e^{-t^-beta}, sigma=1, kappa=beta^{1/beta}
    static Gauge smooth_v();                   // v(t),   sigma=1, kappa=2
    static Gauge indicator(double Delta);      // 1_{t>Delta}; internal cross-check only

    double operator()(double t) const;
    Kind kind() const { return kind_; }
    double param() const { return param_; }  // p, beta, or Delta
    double sigma() const { return sigma_; }
    double kappa() const { return kappa_; }

  private:
    Gauge(Kind k, double param, double sigma, double kappa)
        : kind_(k), param_(param), sigma_(sigma), kappa_(kappa) {}
    Kind kind_;
    double param_;
    double sigma_;
    double kappa_;
};

// Default exponential-gauge exponent for ambient (d,s):
// max(3, (s-d+2)/(s-d+1)).
double default_beta(const AmbientParams& amb);

// Reference smooth convex radial gauge v with v''=2 on [0,1], v''=2(2-t) on
// [1,2], v''=0 beyond; V(x)=v(|x|).
struct SmoothGaugeV {
    static double v(double t);
    static double dv(double t);   // v'
    static double ddv(double t);  // v''
};

struct AdmissibilityReport {
    bool pass = true;
    double first_violation_t = 0.0;
    std::string what;
};

AdmissibilityReport gauge_admissibility_check(const Gauge& g, int grid_size);

// W_{Phi,s}(mu)(x) = int_0^inf Phi(mu(B(x,r))/r^s) dr/r over the window,
// piecewise-exact over constant-mass radius intervals; power and indicator
// gauges use closed forms, others adaptive quadrature to 1e-9 relative.
double wolff_potential(const AtomicMeasure& mu, const Point& x, const Gauge& g,
                       const ScaleWindow& window, int quad_points = 32);

// sum over atoms x of w(x) * wolff_potential(mu, x, power(2), window)
double wolff_energy(const AtomicMeasure& mu, const ScaleWindow& window);

}  // namespace rw
