#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rw/cantor.hpp"
#include "rw/capacity.hpp"
#include "rw/gauges.hpp"
#include "rw/harness.hpp"
#include "rw/io.hpp"
#include "rw/measure.hpp"
#include "rw/riesz.hpp"
#include "rw/scales.hpp"

namespace py = pybind11;
using namespace rw;

namespace {

Point to_point(const std::vector<double>& v) {
    Point p{0.0, 0.0, 0.0};
    if (v.size() > 3) throw std::invalid_argument("points have at most 3 coordinates");
    for (std::size_t i = 0; i < v.size(); ++i) p[i] = v[i];
    return p;
}

}  // namespace

PYBIND11_MODULE(_rieszwolff, m) {
    m.doc() = "s-dimensional Riesz transforms and Wolff potentials on atomic measures";

    py::class_<AmbientParams>(m, "AmbientParams")
        .def(py::init([](int d, double s) {
                 AmbientParams a{d, s};
                 a.validate();
                 return a;
             }),
             py::arg("d"), py::arg("s"))
        .def_readonly("d", &AmbientParams::d)
        .def_readonly("s", &AmbientParams::s);

    py::class_<AtomicMeasure>(m, "AtomicMeasure")
        .def(py::init([](int d, double s, const std::vector<std::vector<double>>& positions,
                         const std::vector<double>& weights) {
                 if (positions.size() != weights.size())
                     throw std::invalid_argument("positions/weights length mismatch");
                 std::vector<Atom> atoms(positions.size());
                 for (std::size_t i = 0; i < atoms.size(); ++i)
                     atoms[i] = Atom{to_point(positions[i]), weights[i]};
                 return AtomicMeasure(AmbientParams{d, s}, std::move(atoms));
             }),
             py::arg("d"), py::arg("s"), py::arg("positions"), py::arg("weights"))
        .def_property_readonly("d", &AtomicMeasure::d)
        .def_property_readonly("s", &AtomicMeasure::s)
        .def("__len__", &AtomicMeasure::size)
        .def("total_mass", &AtomicMeasure::total_mass)
        .def("ball_mass",
             [](const AtomicMeasure& mu, const std::vector<double>& x, double r) {
                 return mu.ball_mass(to_point(x), r);
             },
             py::arg("x"), py::arg("r"))
        .def("to_json", &measure_to_json);

    m.def("measure_from_json", &measure_from_json, py::arg("text"));
    m.def("build_cantor_measure", &build_cantor_measure, py::arg("d"), py::arg("s"),
          py::arg("depth"), py::arg("ratio") = std::nullopt,
          py::arg("jitter_seed") = std::nullopt);

    m.def(
        "riesz_at",
        [](const AtomicMeasure& mu, const std::vector<double>& x, double inner, double outer) {
            KernelEval e = riesz_at(mu, to_point(x), TruncationSpec{inner, outer});
            return std::vector<double>{e.value[0], e.value[1], e.value[2]};
        },
        py::arg("mu"), py::arg("x"), py::arg("inner") = 0.0, py::arg("outer") = 1e308);
    m.def(
        "riesz_field_fast",
        [](const AtomicMeasure& mu, const std::vector<std::vector<double>>& targets,
           double tol, double theta, int threads) {
            std::vector<Point> pts;
            pts.reserve(targets.size());
            for (const auto& t : targets) pts.push_back(to_point(t));
            auto vals = riesz_field_fast(mu, pts, tol, theta, threads);
            std::vector<std::vector<double>> out;
            out.reserve(vals.size());
            for (const auto& v : vals)
                out.push_back({v.value[0], v.value[1], v.value[2]});
            return out;
        },
        py::arg("mu"), py::arg("targets"), py::arg("tol") = 1e-8, py::arg("theta") = 0.3,
        py::arg("threads") = 0);

    m.def(
        "scale_log_measure",
        [](const AtomicMeasure& mu, const std::vector<double>& x, double Delta, double r_min,
           double r_max) {
            return superlevel_scale_set(mu, to_point(x), Delta, ScaleWindow{r_min, r_max})
                .log_measure;
        },
        py::arg("mu"), py::arg("x"), py::arg("Delta"), py::arg("r_min"), py::arg("r_max"));

    py::class_<Gauge>(m, "Gauge")
        .def_static("power", &Gauge::power, py::arg("p"))
        .def_static("exponential", &Gauge::exponential, py::arg("beta"))
        .def_static("smooth_v", &Gauge::smooth_v)
        .def("__call__", &Gauge::operator(), py::arg("t"))
        .def_property_readonly("sigma", &Gauge::sigma)
        .def_property_readonly("kappa", &Gauge::kappa);
    m.def("default_beta", &default_beta, py::arg("ambient"));

    m.def(
        "wolff_potential",
        [](const AtomicMeasure& mu, const std::vector<double>& x, const Gauge& g, double r_min,
           double r_max) {
            return wolff_potential(mu, to_point(x), g, ScaleWindow{r_min, r_max});
        },
        py::arg("mu"), py::arg("x"), py::arg("gauge"), py::arg("r_min"), py::arg("r_max"));
    m.def(
        "wolff_energy",
        [](const AtomicMeasure& mu, double r_min, double r_max) {
            return wolff_energy(mu, ScaleWindow{r_min, r_max});
        },
        py::arg("mu"), py::arg("r_min"), py::arg("r_max"));

    py::class_<CantorParams>(m, "CantorParams")
        .def(py::init<>())
        .def_readwrite("N", &CantorParams::N)
        .def_readwrite("eps", &CantorParams::eps)
        .def_readwrite("M", &CantorParams::M)
        .def_readwrite("delta", &CantorParams::delta)
        .def_readwrite("Delta", &CantorParams::Delta)
        .def_readwrite("gamma", &CantorParams::gamma)
        .def_readwrite("q", &CantorParams::q)
        .def_readwrite("k_cap", &CantorParams::k_cap);

    py::class_<CantorTree>(m, "CantorTree")
        .def_property_readonly("retained_fraction",
                               [](const CantorTree& t) { return t.retained_fraction; })
        .def_property_readonly("support", [](const CantorTree& t) { return t.support; })
        .def("mu_prime_mass", &CantorTree::mu_prime_mass)
        .def("num_levels", [](const CantorTree& t) { return t.levels.size() - 1; })
        .def("num_cells", [](const CantorTree& t) { return t.levels.back().size(); })
        .def("to_json", &tree_to_json);

    m.def(
        "build_cantor_tree",
        [](const AtomicMeasure& mu, const CantorParams& params) {
            return build_cantor_tree(mu, {}, params);
        },
        py::arg("mu"), py::arg("params"), py::keep_alive<0, 1>());
    m.def("verify_construction", [](const CantorTree& tree) {
        auto rep = verify_construction(tree);
        py::dict out;
        for (const auto& p : rep.properties) out[py::str(p.name)] = p.pass;
        out["all_pass"] = rep.all_pass;
        return out;
    });

    m.def(
        "capacity_lower_bound",
        [](const AtomicMeasure& mu, const Gauge& g, double r_min, double r_max) {
            auto est = capacity_lower_bound(mu, g, ScaleWindow{r_min, r_max});
            return py::make_tuple(est.value, est.A_used);
        },
        py::arg("mu"), py::arg("gauge"), py::arg("r_min"), py::arg("r_max"));
}
