#include "twostrain/config.hpp"
#include "twostrain/error.hpp"
#include "twostrain/scenario.hpp"
#include "twostrain/spectra.hpp"

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace twostrain;

namespace {

py::dict spectral_dict(const SpectralResult& r) {
    py::dict d;
    d["value"] = r.value;
    d["bracket_width"] = r.bracket_width;
    d["radius_at_value"] = r.radius_at_value;
    d["radius_at_one"] = r.radius_at_one;
    d["evaluations"] = r.evaluations;
    d["nodes"] = r.nodes;
    d["steps"] = r.steps;
    return d;
}

py::dict manifest_dict(const RunManifest& m) {
    py::dict d;
    d["ok"] = m.ok();
    d["directory"] = m.directory;
    d["config_hash"] = m.config_hash;
    d["classification"] = m.classification ? py::object(py::str(*m.classification)) : py::object(py::none());
    py::list stages;
    for (const auto& s : m.stages) {
        stages.append(py::dict(py::arg("name") = s.name, py::arg("ok") = s.ok, py::arg("message") = s.message));
    }
    d["stages"] = stages;
    py::list outputs;
    for (const auto& o : m.outputs) outputs.append(py::dict(py::arg("path") = o.path, py::arg("sha256") = o.sha256));
    d["outputs"] = outputs;
    return d;
}

// State as a (4, n) array in the order I1, Iv1, I2, Iv2.
py::array_t<double> state_array(const EpidemicState& s) {
    py::array_t<double> a({kComponents, s.nodes()});
    auto v = a.mutable_unchecked<2>();
    for (std::size_t c = 0; c < kComponents; ++c)
        for (std::size_t k = 0; k < s.nodes(); ++k) v(c, k) = s.field(c)[k];
    return a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Two-strain periodic reaction-diffusion malaria model";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_RuntimeError);
    py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_RuntimeError);

    py::class_<StrainParams>(m, "StrainParams")
        .def(py::init([](double gamma, double alpha, double c) { return StrainParams{gamma, alpha, c}; }),
             py::arg("gamma"), py::arg("alpha"), py::arg("c"))
        .def_readwrite("gamma", &StrainParams::gamma)
        .def_readwrite("alpha", &StrainParams::alpha)
        .def_readwrite("c", &StrainParams::c)
        .def("__repr__", [](const StrainParams& s) {
            return "StrainParams(gamma=" + csv_number(s.gamma) + ", alpha=" + csv_number(s.alpha) +
                   ", c=" + csv_number(s.c) + ")";
        });

    py::class_<FieldSpec>(m, "FieldSpec")
        .def(py::init<>())
        .def_readwrite("preset", &FieldSpec::preset)
        .def_readwrite("value", &FieldSpec::value)
        .def_readwrite("a0", &FieldSpec::a0)
        .def_readwrite("b0", &FieldSpec::b0)
        .def_readwrite("scale", &FieldSpec::scale);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("name", &ScenarioConfig::name)
        .def_readwrite("nodes", &ScenarioConfig::nodes)
        .def_readwrite("length", &ScenarioConfig::length)
        .def_readwrite("steps_per_period", &ScenarioConfig::steps_per_period)
        .def_readwrite("periods", &ScenarioConfig::periods)
        .def_readwrite("burn_in_periods", &ScenarioConfig::burn_in_periods)
        .def_readwrite("diffusion_h", &ScenarioConfig::diffusion_h)
        .def_readwrite("diffusion_v", &ScenarioConfig::diffusion_v)
        .def_readwrite("death", &ScenarioConfig::death)
        .def_readwrite("p", &ScenarioConfig::p)
        .def_readwrite("l", &ScenarioConfig::l)
        .def_readwrite("strains", &ScenarioConfig::strains)
        .def_readwrite("beta", &ScenarioConfig::beta)
        .def_readwrite("eta", &ScenarioConfig::eta)
        .def_readwrite("humans", &ScenarioConfig::humans)
        .def_readwrite("mosquitoes", &ScenarioConfig::mosquitoes)
        .def_readwrite("initial", &ScenarioConfig::initial)
        .def_readwrite("probes", &ScenarioConfig::probes)
        .def_readwrite("output_dir", &ScenarioConfig::output_dir)
        .def_readwrite("record_stride", &ScenarioConfig::record_stride)
        .def_readwrite("extinction_threshold", &ScenarioConfig::extinction_threshold)
        .def_property(
            "bisection_tol", [](const ScenarioConfig& c) { return c.solver.bisection_tol; },
            [](ScenarioConfig& c, double v) { c.solver.bisection_tol = v; })
        .def("dump", &dump_config)
        .def("hash", &config_hash)
        .def("problems", [](const ScenarioConfig& c) { return validate(c); })
        .def("__eq__", &ScenarioConfig::operator==);

    m.def("preset", &preset_config, py::arg("name"), "Code-owned preset: baseline, case1, case2, case3");
    m.def("preset_names", &preset_names);
    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("save_config", &save_config, py::arg("config"), py::arg("path"));

    py::class_<TwoStrainModel>(m, "Model")
        .def(py::init([](const ScenarioConfig& c) { return TwoStrainModel(build_scenario(c).params); }),
             py::arg("config"))
        .def_property_readonly("nodes", &TwoStrainModel::nodes)
        .def_property_readonly("dt", &TwoStrainModel::dt)
        .def_property_readonly("x", [](const TwoStrainModel& md) { return md.grid().nodes(); })
        .def_property_readonly("q", [](const TwoStrainModel& md) { return md.params().q(); })
        .def(
            "basic_numbers",
            [](const TwoStrainModel& md, double tol) {
                SolverSettings s;
                s.bisection_tol = tol;
                py::gil_scoped_release release;
                const auto b = basic_numbers(md, s);
                py::gil_scoped_acquire acquire;
                py::dict d;
                d["R1"] = spectral_dict(b.strain[0]);
                d["R2"] = spectral_dict(b.strain[1]);
                d["R0"] = b.r0;
                return d;
            },
            py::arg("tol") = 1e-4)
        .def(
            "invasion_numbers",
            [](const TwoStrainModel& md, double tol) {
                SolverSettings s;
                s.bisection_tol = tol;
                py::gil_scoped_release release;
                const auto b = basic_numbers(md, s);
                const auto inv = invasion_numbers(md, b, s);
                py::gil_scoped_acquire acquire;
                py::dict d;
                d["Rhat1"] = spectral_dict(inv[0].result);
                d["Rhat2"] = spectral_dict(inv[1].result);
                return d;
            },
            py::arg("tol") = 1e-4)
        .def(
            "simulate",
            [](const TwoStrainModel& md, const std::string& initial, double t_end, double burn_in,
               double threshold) {
                SimulationOptions o;
                o.t_end = t_end;
                o.burn_in = burn_in;
                EpidemicState init = initial == "zero" ? EpidemicState(md.nodes(), 0, 0.0)
                                                       : figure_initial_state(md.grid());
                std::optional<TrajectorySummary> s;
                {
                    py::gil_scoped_release release;
                    s = simulate(md, std::move(init), o);
                }
                py::dict d;
                d["floor"] = std::vector<double>(s->persistence.floor.begin(), s->persistence.floor.end());
                d["ceiling"] = std::vector<double>(s->persistence.ceiling.begin(), s->persistence.ceiling.end());
                d["classification"] = to_string(classify(s->persistence, threshold));
                d["max_residual"] = s->max_residual;
                d["positivity_ok"] = s->positivity_ok;
                d["final_state"] = state_array(s->final_state);
                d["final_time"] = s->final_state.time();
                return d;
            },
            py::arg("initial") = "figure", py::arg("t_end") = 600.0, py::arg("burn_in") = 480.0,
            py::arg("threshold") = 1e-6);

    m.def(
        "run_scenario",
        [](const ScenarioConfig& c, bool invasion, bool simulate_stage) {
            py::gil_scoped_release release;
            auto man = run_scenario(c, {invasion, simulate_stage}, "python");
            py::gil_scoped_acquire acquire;
            return manifest_dict(man);
        },
        py::arg("config"), py::arg("invasion") = true, py::arg("simulate") = true);
    m.def(
        "run_sweep",
        [](const ScenarioConfig& c, const std::string& axis, const std::vector<double>& values, std::size_t workers) {
            const auto a = parse_axis(axis);
            py::gil_scoped_release release;
            auto man = run_sweep(c, a, values, workers);
            py::gil_scoped_acquire acquire;
            return manifest_dict(man);
        },
        py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("workers") = 1);
    m.def(
        "vector_bias_scaling",
        [](const ScenarioConfig& c, const std::vector<double>& q, double tol) {
            SolverSettings s;
            s.bisection_tol = tol;
            const auto params = build_scenario(c).params;
            std::vector<VectorBiasRow> rows;
            {
                py::gil_scoped_release release;
                rows = vector_bias_scaling(params, q, s);
            }
            py::list out;
            for (const auto& r : rows) {
                out.append(py::dict(py::arg("q") = r.q, py::arg("R1") = r.r[0], py::arg("R2") = r.r[1],
                                    py::arg("R0") = r.r0, py::arg("R0_sqrt_q") = r.r0_sqrt_q));
            }
            return out;
        },
        py::arg("config"), py::arg("q"), py::arg("tol") = 1e-6);
    m.def(
        "seasonal_beta",
        [](double t, double a0, std::optional<double> b0) {
            return b0 ? seasonal_beta_two_param(a0, *b0)(t, 0.0) : seasonal_beta_preset()(t, 0.0);
        },
        py::arg("t"), py::arg("a0") = 5.1492, py::arg("b0") = py::none(),
        "Biting rate at time t; the five-harmonic preset unless b0 is given.");

    m.attr("__version__") = "0.1.0";
}
