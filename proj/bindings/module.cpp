#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "recabs/acceptance.hpp"
#include "recabs/ensemble.hpp"
#include "recabs/figures.hpp"
#include "recabs/io.hpp"
#include "recabs/liouville.hpp"
#include "recabs/optimize.hpp"
#include "recabs/recovery.hpp"

namespace py = pybind11;
using namespace recabs;

namespace {

PresetParams params_from_kwargs(const py::kwargs& kwargs) {
    PresetParams p;
    for (const auto& item : kwargs) {
        const std::string key = py::cast<std::string>(item.first);
        const double value = py::cast<double>(item.second);
        if (key == "omega") p.omega = value;
        else if (key == "delta") p.delta = value;
        else if (key == "omega_r") p.omega_r = value;
        else if (key == "delta_r") p.delta_r = value;
        else if (key == "gamma") p.gamma = value;
        else if (key == "gamma_r") p.gamma_r = value;
        else if (key == "gamma_sg") p.gamma_sg = value;
        else if (key == "sigma") p.sigma = value;
        else if (key == "sigma2") p.sigma2 = value;
        else if (key == "eta") p.eta = value;
        else if (key == "probe_amplitude") p.probe_amplitude = value;
        else if (key == "e_branch_to_g") p.e_branch_to_g = value;
        else if (key == "s_decay_rate") p.s_decay_rate = value;
        else if (key == "extra_splitting") p.extra_splitting = value;
        else throw ValidationError("unknown preset parameter '" + key + "'");
    }
    return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Absorption recovery in inhomogeneously broadened multilevel media";

    py::register_exception<Error>(m, "RecabsError");

    py::class_<LevelScheme>(m, "LevelScheme")
        .def_property_readonly("dimension", &LevelScheme::dimension)
        .def("to_json", &scheme_to_json)
        .def("two_photon_shift_coefficient", &LevelScheme::two_photon_shift_coefficient)
        .def("probe_gamma", &LevelScheme::probe_gamma)
        .def("__repr__", [](const LevelScheme& s) {
            return "<LevelScheme with " + std::to_string(s.dimension()) + " levels>";
        });

    m.def(
        "preset",
        [](const std::string& kind, const py::kwargs& kwargs) {
            return preset(kind, params_from_kwargs(kwargs));
        },
        py::arg("kind"),
        "Build a named level scheme (two_level, lambda, n_type, ladder_rydberg, "
        "n_type_extra_hf); keyword arguments override the default parameters.");
    m.def("scheme_from_json", &scheme_from_json, py::arg("text"));
    m.def("set_parameter", &set_parameter, py::arg("scheme"), py::arg("path"),
          py::arg("value"));

    py::class_<QuadratureGrid>(m, "QuadratureGrid")
        .def_readonly("nodes", &QuadratureGrid::nodes)
        .def_readonly("weights", &QuadratureGrid::weights)
        .def_readonly("span", &QuadratureGrid::span);
    m.def("quadrature_grid", &quadrature_grid, py::arg("n") = 4001, py::arg("span") = 5.0);

    py::class_<Spectrum>(m, "Spectrum")
        .def_readonly("probe_detunings", &Spectrum::probe_detunings)
        .def_readonly("absorption", &Spectrum::absorption)
        .def_readonly("grid_n", &Spectrum::grid_n)
        .def_readonly("probe_rabi", &Spectrum::probe_rabi);

    m.def(
        "absorption",
        [](const LevelScheme& s, double u, double probe_detuning) {
            return AbsorberModel(s).absorption(u, probe_detuning);
        },
        py::arg("scheme"), py::arg("u"), py::arg("probe_detuning"),
        "Normalized absorption of a single absorber.");
    m.def(
        "ensemble_absorption",
        [](const LevelScheme& s, double probe_detuning, const QuadratureGrid& grid) {
            return ensemble_absorption(s, probe_detuning, grid);
        },
        py::arg("scheme"), py::arg("probe_detuning"), py::arg("grid"));
    m.def(
        "spectrum",
        [](const LevelScheme& s, double lo, double hi, int n, const QuadratureGrid& grid,
           int workers) { return spectrum(s, lo, hi, n, grid, workers); },
        py::arg("scheme"), py::arg("detuning_min"), py::arg("detuning_max"),
        py::arg("n_points"), py::arg("grid"), py::arg("workers") = 0);

    py::class_<PeakResult>(m, "PeakResult")
        .def_readonly("detuning", &PeakResult::detuning)
        .def_readonly("height", &PeakResult::height)
        .def_readonly("at_edge", &PeakResult::at_edge);
    m.def("peak", &peak, py::arg("spectrum"), py::arg("window_min"), py::arg("window_max"));

    m.def("inhomogeneous_limit", &inhomogeneous_limit, py::arg("sigma"), py::arg("gamma"));

    py::class_<CompensationPlan>(m, "CompensationPlan")
        .def_readonly("omega_r", &CompensationPlan::omega_r)
        .def_readonly("delta_r", &CompensationPlan::delta_r)
        .def_readonly("eta", &CompensationPlan::eta);
    m.def("compensation_plan", &compensation_plan, py::arg("omega"), py::arg("delta"),
          py::arg("eta") = 1.0);

    py::class_<ScatteringRates>(m, "ScatteringRates")
        .def_readonly("gamma_sc", &ScatteringRates::gamma_sc)
        .def_readonly("gamma_sc_r", &ScatteringRates::gamma_sc_r);
    m.def("scattering_rates", &scattering_rates, py::arg("omega"), py::arg("delta"),
          py::arg("sigma"), py::arg("gamma"), py::arg("omega_r"), py::arg("delta_r"),
          py::arg("sigma_r"), py::arg("gamma_r"));

    py::class_<EnhancementPrediction>(m, "EnhancementPrediction")
        .def_readonly("beta0", &EnhancementPrediction::beta0)
        .def_readonly("gamma_sc", &EnhancementPrediction::gamma_sc)
        .def_readonly("gamma_sc_r", &EnhancementPrediction::gamma_sc_r)
        .def_readonly("mu", &EnhancementPrediction::mu)
        .def_readonly("beta", &EnhancementPrediction::beta);
    m.def("predicted_beta", &predicted_beta, py::arg("rates"), py::arg("gamma_sg"),
          py::arg("beta0"));

    m.def("extract_beta", &extract_beta, py::arg("with_fields"), py::arg("reference_bare"),
          py::arg("window_min"), py::arg("window_max"));
    m.def("at_window_width", &at_window_width, py::arg("spectrum"), py::arg("threshold"),
          py::arg("peak_min") = -1e300, py::arg("peak_max") = 1e300);
    m.def("bare_reference_scheme", &bare_reference_scheme, py::arg("scheme"));
    m.def("voigt_peak_oracle", &voigt_peak_oracle, py::arg("sigma"), py::arg("gamma"));

#ifdef VERSION_INFO
#define RECABS_STR2(x) #x
#define RECABS_STR(x) RECABS_STR2(x)
    m.attr("__version__") = RECABS_STR(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
