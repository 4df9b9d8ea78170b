#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlh/beams.hpp"
#include "nlh/config.hpp"
#include "nlh/driver.hpp"
#include "nlh/errors.hpp"
#include "nlh/helmholtz1d.hpp"
#include "nlh/solvers.hpp"

namespace py = pybind11;
using namespace nlh;

namespace {

// (N+7, M) array, row 0 is the ghost node n = -3
py::array_t<std::complex<double>> to_numpy(const ComplexField2D& E) {
    py::array_t<std::complex<double>> a({E.N() + 7, E.M()});
    std::copy(E.values().begin(), E.values().end(), a.mutable_data());
    return a;
}

py::dict outcome_dict(const RunOutcome& o) {
    py::dict d;
    d["converged"] = o.report.converged;
    d["iterations"] = o.report.iterations;
    d["solver"] = o.report.solver;
    d["seconds"] = o.report.seconds;
    d["max_abs"] = o.diagnostics.maxAbs;
    d["focus_z"] = o.diagnostics.focusZ;
    d["kerr_peak"] = o.diagnostics.kerrPeak;
    d["power_deviation"] = o.diagnostics.powerDeviation;
    d["oscillation_frequency"] = o.diagnostics.oscillationFrequency;
    d["field"] = to_numpy(o.field);
    d["exit_code"] = o.exitCode;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Nonlinear Helmholtz solver";

    py::register_exception<Error>(m, "NlhError", PyExc_RuntimeError);

    m.def("characteristic_root", [](double k0, double h) { return characteristic_root(k0, h).q; },
          py::arg("k0"), py::arg("h"));

    m.def(
        "transfer_matrix",
        [](double k0, double Zmax, double nu, double EincL, double EincR) {
            const TransferResult t = transfer_matrix_linear(homogeneous_slab(k0, 1.0, Zmax, nu, 0.0), {EincL, EincR});
            return py::make_tuple(t.R, t.T);
        },
        py::arg("k0"), py::arg("Zmax"), py::arg("nu"), py::arg("EincL") = 1.0, py::arg("EincR") = 0.0,
        "Exact (R, T) of a homogeneous linear slab.");

    m.def(
        "solve_slab_1d",
        [](double k0, double Zmax, int N, double nu, double eps, double sigma, std::complex<double> EincL,
           std::complex<double> EincR) {
            auto [E, rep] = solve_1d(build_grid_1d(Zmax, N), homogeneous_slab(k0, sigma, Zmax, nu, eps), {EincL, EincR},
                                     SolverConfig{});
            Eigen::VectorXcd col = E.vec();
            py::array_t<std::complex<double>> a(col.size());
            std::copy(col.data(), col.data() + col.size(), a.mutable_data());
            return py::make_tuple(a, rep.converged);
        },
        py::arg("k0"), py::arg("Zmax"), py::arg("N"), py::arg("nu") = 1.0, py::arg("eps") = 0.0,
        py::arg("sigma") = 1.0, py::arg("EincL") = 1.0, py::arg("EincR") = 0.0,
        "Field on nodes -3..N+3 and the convergence flag.");

    m.def("critical_power_ratio",
          [](double eps, double k0, const std::string& geometry, double sigma) {
              return critical_power_ratio(eps, k0, BeamSpec{}, parse_geometry(geometry), sigma);
          },
          py::arg("eps"), py::arg("k0"), py::arg("geometry") = "cylindrical", py::arg("sigma") = 1.0);

    m.def("soliton_profile", &soliton_profile, py::arg("k0"), py::arg("eps"), py::arg("r0"), py::arg("x"),
          py::arg("z") = 0.0);

    m.def("preset_names", &preset_names);
    m.def("preset", [](const std::string& name) { return serialize_config(preset(name)); }, py::arg("name"),
          "Canonical JSON of a named preset.");
    m.def("normalize_config", [](const std::string& text) { return serialize_config(parse_config(text)); },
          py::arg("text"));
    m.def("run", [](const std::string& text, bool write) { return outcome_dict(run_solve(parse_config(text), write)); },
          py::arg("config"), py::arg("write") = false, "Solve a JSON configuration; returns a dict of results.");
}
