#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "doismol/harness.hpp"
#include "doismol/mc.hpp"

namespace py = pybind11;
using namespace doismol;

PYBIND11_MODULE(_doismol, m) {
    m.doc() = "Doi and Smoluchowski binding models in a reflecting ball";

    py::register_exception<NumericsError>(m, "NumericsError", PyExc_RuntimeError);
    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);

    py::class_<Geometry>(m, "Geometry")
        .def(py::init([](double r_b, double R, double D) {
                 Geometry g{r_b, R, D};
                 g.validate();
                 return g;
             }),
             py::arg("r_b") = 1e-3, py::arg("R") = 1.0, py::arg("D") = 10.0)
        .def_readwrite("r_b", &Geometry::r_b)
        .def_readwrite("R", &Geometry::R)
        .def_readwrite("D", &Geometry::D)
        .def("__repr__", [](const Geometry& g) {
            return "Geometry(r_b=" + format_number(g.r_b) + ", R=" + format_number(g.R) +
                   ", D=" + format_number(g.D) + ")";
        });

    m.def("smol_eigenvalues", [](const Geometry& g, std::size_t count) {
        return smol_eigenvalues(g, count).values();
    }, py::arg("geom"), py::arg("count"));
    m.def("doi_eigenvalues", [](const Geometry& g, double lambda, std::size_t count) {
        return doi_eigenvalues(g, lambda / g.D, count).values();
    }, py::arg("geom"), py::arg("lambda_"), py::arg("count"),
       "First eigenvalues for reaction rate lambda_ [1/s].");

    m.def("mean_binding_smol", &mean_binding_smol, py::arg("geom"), py::arg("r0"));
    m.def("mean_binding_doi", &mean_binding_doi, py::arg("geom"), py::arg("lambda_"), py::arg("r0"));
    m.def("mean_diff", &mean_diff, py::arg("geom"), py::arg("lambda_"), py::arg("r0"));
    m.def("rel_diff", &rel_diff, py::arg("geom"), py::arg("lambda_"), py::arg("r0"));

    py::class_<SpectralSolution>(m, "SpectralSolution")
        .def_static("smoluchowski", [](const Geometry& g, double r0) {
            return SpectralSolution::smoluchowski(g, r0);
        }, py::arg("geom"), py::arg("r0"))
        .def_static("doi", [](const Geometry& g, double lambda, double r0) {
            return SpectralSolution::doi(g, lambda, r0);
        }, py::arg("geom"), py::arg("lambda_"), py::arg("r0"))
        .def("density", [](const SpectralSolution& s, double r, double t) { return s.density(r, t).value; })
        .def("cdf", [](const SpectralSolution& s, double t) { return s.cdf(t).value; })
        .def("survival", [](const SpectralSolution& s, double t) { return s.survival(t).value; })
        .def_property_readonly("mode_count", [](const SpectralSolution& s) { return s.modes().count(); });

    m.def("reference_grids", [](const Geometry& g) {
        const GridSpec grid = reference_grids(g);
        return py::make_tuple(grid.r_points, grid.t_points);
    }, py::arg("geom"), "(r_points, t_points) of the reference grid");

    m.def("sup_norm_cdf_diff", [](const Geometry& g, double lambda, double r0, std::size_t stride) {
        NormOptions o;
        o.stride = stride;
        return sup_norm_cdf_diff(g, lambda, r0, o).value;
    }, py::arg("geom"), py::arg("lambda_"), py::arg("r0"), py::arg("stride") = 1);

    m.def("loglog_slope", [](const std::vector<std::pair<double, double>>& pts) {
        return loglog_slope(pts).slope;
    }, py::arg("points"));

    m.def("simulate_mean", [](const Geometry& g, double r0, const std::string& model, double lambda,
                              std::size_t n_paths, double dt, double t_max, std::uint64_t seed) {
        McConfig cfg;
        cfg.model = model == "doi" ? Model::Doi : Model::Smoluchowski;
        cfg.lambda = lambda;
        cfg.n_paths = n_paths;
        cfg.dt = dt;
        cfg.t_max = t_max;
        cfg.seed = seed;
        py::gil_scoped_release release;
        const BindingSample s = simulate(g, r0, cfg);
        return std::make_pair(s.mean_restricted, s.ci95_halfwidth);
    }, py::arg("geom"), py::arg("r0"), py::arg("model") = "smol", py::arg("lambda_") = 0.0,
       py::arg("n_paths") = 1000, py::arg("dt") = 5e-7, py::arg("t_max") = 5.0, py::arg("seed") = 1,
       "(restricted mean, 95% half width) of simulated binding times");
}
