#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rw/capacity.hpp"
#include "rw/cantor.hpp"
#include "rw/errors.hpp"
#include "rw/gauges.hpp"
#include "rw/harness.hpp"
#include "rw/io.hpp"
#include "rw/measure.hpp"
#include "rw/riesz.hpp"
#include "rw/scales.hpp"

namespace {

bool log_enabled() {
    static const bool on = [] {
        const char* v = std::getenv("RW_LOG");
        return v != nullptr && *v != '\0';
    }();
    return on;
}

void log_line(const std::string& msg) {
    if (log_enabled()) std::cerr << "[rw] " << msg << "\n";
}

rw::Point parse_point(const std::string& text, int d) {
    rw::Point p{0.0, 0.0, 0.0};
    std::istringstream ss(text);
    std::string tok;
    int i = 0;
    while (std::getline(ss, tok, ',')) {
        if (i >= 3) throw std::invalid_argument("too many coordinates in '" + text + "'");
        p[static_cast<std::size_t>(i++)] = rw::string_to_double(tok);
    }
    if (i != d)
        throw std::invalid_argument("expected " + std::to_string(d) + " coordinates in '" +
                                    text + "'");
    return p;
}

rw::Gauge parse_gauge(const std::string& text) {
    auto colon = text.find(':');
    std::string name = text.substr(0, colon);
    if (name == "power") {
        if (colon == std::string::npos)
            throw std::invalid_argument("power gauge needs an exponent, e.g. power:2");
        return rw::Gauge::power(rw::string_to_double(text.substr(colon + 1)));
    }
    if (name == "exp") {
        if (colon == std::string::npos)
            throw std::invalid_argument("exp gauge needs beta, e.g. exp:3");
        return rw::Gauge::exponential(rw::string_to_double(text.substr(colon + 1)));
    }
    if (name == "v") return rw::Gauge::smooth_v();
    throw std::invalid_argument("unknown gauge '" + text + "' (power:p, exp:beta, v)");
}

int run(int argc, char** argv) {
    CLI::App app{"s-dimensional Riesz transforms, scale analysis, Wolff potentials, and "
                 "Cantor-type constructions on finite atomic measures"};
    app.require_subcommand(1);

    // ---- generate ----
    auto* gen = app.add_subcommand("generate", "generate a Cantor-type test measure");
    int gen_d = 2, gen_depth = 3;
    double gen_s = 1.5;
    std::optional<double> gen_ratio;
    std::optional<std::uint64_t> gen_seed;
    std::string gen_out;
    gen->add_option("--d", gen_d, "ambient dimension (2 or 3)");
    gen->add_option("--s", gen_s, "fractional dimension, in (d-1,d)");
    gen->add_option("--depth", gen_depth, "construction depth");
    gen->add_option("--ratio", gen_ratio, "contraction ratio (default 2^(-d/s))");
    gen->add_option("--jitter-seed", gen_seed, "deterministic jitter seed");
    gen->add_option("-o,--output", gen_out, "output measure file")->required();

    // ---- riesz ----
    auto* rz = app.add_subcommand("riesz", "evaluate the truncated Riesz transform");
    std::string rz_measure;
    std::vector<std::string> rz_at;
    double rz_inner = 0.0, rz_outer = 1e308, rz_tol = 1e-8, rz_theta = 0.3;
    bool rz_fast = false;
    int rz_threads = 0;
    rz->add_option("--measure", rz_measure, "measure file")->required();
    rz->add_option("--at", rz_at, "evaluation point x,y[,z] (repeatable)")->required();
    rz->add_option("--inner", rz_inner, "inner truncation radius");
    rz->add_option("--outer", rz_outer, "outer truncation radius");
    rz->add_flag("--fast", rz_fast, "certified treecode evaluation");
    rz->add_option("--tol", rz_tol, "relative error budget for --fast");
    rz->add_option("--theta", rz_theta, "treecode opening angle");
    rz->add_option("--threads", rz_threads, "worker threads (0 = hardware)");

    // ---- scales ----
    auto* sc = app.add_subcommand("scales", "super-level scale sets and weak-type curve");
    std::string sc_measure;
    std::vector<std::string> sc_at;
    double sc_Delta = 0.25, sc_rmin = 1e-6, sc_rmax = 1.0;
    bool sc_weak = false;
    std::vector<double> sc_T;
    int sc_threads = 0;
    sc->add_option("--measure", sc_measure, "measure file")->required();
    sc->add_option("--at", sc_at, "evaluation point x,y[,z] (repeatable)");
    sc->add_option("--Delta", sc_Delta, "density threshold");
    sc->add_option("--r-min", sc_rmin, "window lower bound");
    sc->add_option("--r-max", sc_rmax, "window upper bound");
    sc->add_flag("--weak-type", sc_weak, "compute the weak-type curve over all atoms");
    sc->add_option("--T", sc_T, "weak-type thresholds (repeatable)");
    sc->add_option("--threads", sc_threads, "worker threads (0 = hardware)");

    // ---- wolff ----
    auto* wf = app.add_subcommand("wolff", "Wolff-type potential");
    std::string wf_measure, wf_gauge = "power:2";
    std::vector<std::string> wf_at;
    double wf_rmin = 1e-6, wf_rmax = 1.0;
    bool wf_energy = false;
    wf->add_option("--measure", wf_measure, "measure file")->required();
    wf->add_option("--at", wf_at, "evaluation point x,y[,z] (repeatable)");
    wf->add_option("--gauge", wf_gauge, "gauge: power:p, exp:beta, or v");
    wf->add_option("--r-min", wf_rmin, "window lower bound");
    wf->add_option("--r-max", wf_rmax, "window upper bound");
    wf->add_flag("--energy", wf_energy, "total quadratic Wolff energy");

    // ---- cantor ----
    auto* ct = app.add_subcommand("cantor", "build the multi-level cell hierarchy");
    std::string ct_measure, ct_out;
    rw::CantorParams ct_params;
    ct->add_option("--measure", ct_measure, "measure file")->required();
    ct->add_option("--N", ct_params.N, "number of levels");
    ct->add_option("--eps", ct_params.eps, "separation parameter");
    ct->add_option("--M", ct_params.M, "low-density halo factor (> 4)");
    ct->add_option("--delta", ct_params.delta, "low-density threshold");
    ct->add_option("--Delta", ct_params.Delta, "good-scale threshold");
    ct->add_option("--gamma", ct_params.gamma, "retained-mass target");
    ct->add_option("--q", ct_params.q, "dyadic search depth");
    ct->add_option("-o,--output", ct_out, "output tree file")->required();

    // ---- verify ----
    auto* vf = app.add_subcommand("verify", "verify a built hierarchy");
    std::string vf_measure, vf_tree;
    vf->add_option("--measure", vf_measure, "measure file")->required();
    vf->add_option("--tree", vf_tree, "tree file")->required();

    // ---- capacity ----
    auto* cp = app.add_subcommand("capacity", "capacity lower bound via Wolff potentials");
    std::string cp_measure, cp_gauge;
    double cp_rmin = 1e-6, cp_rmax = 1.0;
    cp->add_option("--measure", cp_measure, "measure file")->required();
    cp->add_option("--gauge", cp_gauge, "gauge (default: exp with the canonical beta)");
    cp->add_option("--r-min", cp_rmin, "window lower bound");
    cp->add_option("--r-max", cp_rmax, "window upper bound");

    CLI11_PARSE(app, argc, argv);

    if (*gen) {
        log_line("generating measure");
        auto mu = rw::build_cantor_measure(gen_d, gen_s, gen_depth, gen_ratio, gen_seed);
        rw::save_measure(mu, gen_out);
        std::cout << "atoms=" << mu.size() << " mass=" << rw::double_to_string(mu.total_mass())
                  << "\n";
        return 0;
    }

    if (*rz) {
        auto mu = rw::load_measure(rz_measure);
        std::vector<rw::Point> targets;
        for (const auto& t : rz_at) targets.push_back(parse_point(t, mu.d()));
        if (rz_fast) {
            auto vals = rw::riesz_field_fast(mu, targets, rz_tol, rz_theta, rz_threads);
            for (std::size_t i = 0; i < vals.size(); ++i)
                std::cout << rw::double_to_string(vals[i].value[0]) << ","
                          << rw::double_to_string(vals[i].value[1]) << ","
                          << rw::double_to_string(vals[i].value[2])
                          << " error_bound=" << rw::double_to_string(vals[i].error_bound)
                          << "\n";
        } else {
            for (const auto& x : targets) {
                auto v = rw::riesz_at(mu, x, rw::TruncationSpec{rz_inner, rz_outer});
                std::cout << rw::double_to_string(v.value[0]) << ","
                          << rw::double_to_string(v.value[1]) << ","
                          << rw::double_to_string(v.value[2]) << "\n";
            }
        }
        return 0;
    }

    if (*sc) {
        auto mu = rw::load_measure(sc_measure);
        rw::ScaleWindow window{sc_rmin, sc_rmax};
        if (sc_weak) {
            if (sc_T.empty()) sc_T = {1.5, 2.0, 3.0, 4.0, 6.0, 8.0};
            auto curve = rw::weak_type_statistic(mu, sc_Delta, sc_T, window, sc_threads);
            std::cout << "T,mass_above\n";
            for (const auto& p : curve.points)
                std::cout << rw::double_to_string(p.T) << ","
                          << rw::double_to_string(p.mass_above) << "\n";
            std::cout << "alpha_hat=" << rw::double_to_string(curve.alpha_hat) << "\n";
            return 0;
        }
        if (sc_at.empty()) throw std::invalid_argument("scales: need --at or --weak-type");
        for (const auto& t : sc_at) {
            auto set = rw::superlevel_scale_set(mu, parse_point(t, mu.d()), sc_Delta, window);
            for (const auto& [lo, hi] : set.intervals)
                std::cout << "[" << rw::double_to_string(lo) << ","
                          << rw::double_to_string(hi) << ") ";
            std::cout << "log_measure=" << rw::double_to_string(set.log_measure) << "\n";
        }
        return 0;
    }

    if (*wf) {
        auto mu = rw::load_measure(wf_measure);
        rw::ScaleWindow window{wf_rmin, wf_rmax};
        if (wf_energy) {
            std::cout << "energy=" << rw::double_to_string(rw::wolff_energy(mu, window))
                      << "\n";
            return 0;
        }
        if (wf_at.empty()) throw std::invalid_argument("wolff: need --at or --energy");
        rw::Gauge g = parse_gauge(wf_gauge);
        for (const auto& t : wf_at)
            std::cout << rw::double_to_string(
                             rw::wolff_potential(mu, parse_point(t, mu.d()), g, window))
                      << "\n";
        return 0;
    }

    if (*ct) {
        auto mu = rw::load_measure(ct_measure);
        log_line("building hierarchy");
        auto tree = rw::build_cantor_tree(mu, {}, ct_params);
        rw::save_tree(tree, ct_out);
        std::cout << "levels=" << tree.levels.size() - 1
                  << " cells=" << tree.levels.back().size()
                  << " retained=" << rw::double_to_string(tree.retained_fraction) << "\n";
        return 0;
    }

    if (*vf) {
        auto mu = rw::load_measure(vf_measure);
        auto tree = rw::load_tree(vf_tree, mu);
        auto rep = rw::verify_construction(tree);
        for (const auto& p : rep.properties)
            std::cout << p.name << ": " << (p.pass ? "pass" : "FAIL " + p.witness) << "\n";
        return rep.all_pass ? 0 : 3;
    }

    if (*cp) {
        auto mu = rw::load_measure(cp_measure);
        rw::ScaleWindow window{cp_rmin, cp_rmax};
        rw::Gauge g = cp_gauge.empty()
                          ? rw::Gauge::exponential(rw::default_beta(mu.ambient()))
                          : parse_gauge(cp_gauge);
        auto est = rw::capacity_lower_bound(mu, g, window);
        std::cout << "capacity_lower=" << rw::double_to_string(est.value)
                  << " A=" << rw::double_to_string(est.A_used)
                  << " witness_atoms=" << est.witness.size() << "\n";
        return 0;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const rw::ConstructionFailure& e) {
        std::cerr << "construction failure: " << e.what() << "\n";
        return 2;
    } catch (const rw::InsufficientScalesError& e) {
        std::cerr << "construction failure: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
