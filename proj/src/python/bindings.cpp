#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>

#include "nullwave/cli.hpp"
#include "nullwave/errors.hpp"
#include "nullwave/experiments.hpp"
#include "nullwave/models.hpp"
#include "nullwave/solver.hpp"
#include "nullwave/weights.hpp"

namespace py = pybind11;
using namespace nullwave;

namespace {

RunOptions run_options(const RunConfig& c) {
    RunOptions o;
    o.blowup_threshold = c.blowup_threshold;
    o.closure = c.closure;
    o.dissipation = c.dissipation;
    return o;
}

InitialData initial_data(const RunConfig& c, const SystemSpec& spec) {
    return make_initial_data(c.family, c.epsilon.front(), c.grid, spec.n, c.delta, c.shape);
}

// (npts, n) array copied from an interleaved field.
py::array_t<double> field(const std::vector<double>& f, int n) {
    const auto nc = static_cast<py::ssize_t>(n);
    py::array_t<double> a({static_cast<py::ssize_t>(f.size()) / nc, nc});
    std::copy(f.begin(), f.end(), a.mutable_data());
    return a;
}

py::dict solve(const std::string& text) {
    const RunConfig c = parse_config(text);
    const SystemSpec spec = catalog_get(c.model);
    const InitialData d = initial_data(c, spec);
    RunSummary r;
    {
        py::gil_scoped_release release;
        r = run(spec, d, c.grid, {}, run_options(c));
    }
    py::array_t<double> x(static_cast<py::ssize_t>(c.grid.npts()));
    for (std::size_t i = 0; i < c.grid.npts(); ++i) x.mutable_data()[i] = c.grid.x(i);
    py::dict out;
    out["x"] = x;
    out["t_end"] = r.t_end;
    out["steps"] = r.steps_taken;
    out["dt"] = r.dt;
    out["amplitude"] = d.amplitude;
    out["max_pq"] = r.max_pq;
    out["blowup"] = r.blowup.detected;
    out["t_blowup"] = r.blowup.detected ? py::cast(r.blowup.t_blowup) : py::none();
    out["u"] = field(r.final_state.u, spec.n);
    out["v"] = field(r.final_state.v, spec.n);
    out["w"] = field(r.final_state.w, spec.n);
    return out;
}

py::dict energies(const std::string& text) {
    const RunConfig c = parse_config(text);
    const SystemSpec spec = catalog_get(c.model);
    const InitialData d = initial_data(c, spec);
    const Weights weights(WeightParams{c.delta});
    DiagnosticOptions opts;
    opts.energy_stride = c.stride;
    opts.run = run_options(c);
    DiagnosedRun r;
    {
        py::gil_scoped_release release;
        r = run_diagnosed(spec, d, c.grid, weights, opts);
    }
    const auto m = static_cast<py::ssize_t>(r.snapshots.size());
    py::array_t<double> t(m), e({m, py::ssize_t{kMaxOrder}}), ee({m, py::ssize_t{kMaxOrder}});
    for (py::ssize_t i = 0; i < m; ++i) {
        const EnergySnapshot& s = r.snapshots[static_cast<std::size_t>(i)];
        t.mutable_at(i) = s.t;
        for (int k = 1; k <= kMaxOrder; ++k) {
            e.mutable_at(i, k - 1) = s.E.full[static_cast<std::size_t>(k)];
            ee.mutable_at(i, k - 1) = s.EE.full[static_cast<std::size_t>(k)];
        }
    }
    py::dict out;
    out["t"] = t;
    out["E"] = e;
    out["EE"] = ee;
    out["Q"] = r.Q();
    out["blowup"] = r.summary.blowup.detected;
    out["checks"] = r.checks.to_json().dump();
    out["flux"] = r.flux.to_json().dump();
    return out;
}

py::tuple run_subcommand(const std::string& sub, const std::string& text, const std::string& out_dir) {
    const RunConfig c = parse_config(text);
    std::ostringstream log;
    int code = 0;
    {
        py::gil_scoped_release release;
        code = dispatch(sub, c, out_dir, log);
    }
    return py::make_tuple(code, log.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Weighted-energy diagnostics for 1-D quasilinear wave systems on the half-line";

    // Translators run newest first, so the base class goes first.
    py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<LookupError>(m, "LookupError", PyExc_KeyError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.attr("DEFAULT_DISSIPATION") = kDefaultDissipation;
    m.def("catalog_names", &catalog_names);
    m.def("subcommand_names", &subcommand_names);
    m.def("phi_theta", [](double x, double delta) { return phi_theta(x, WeightParams{delta}); }, py::arg("x"),
          py::arg("delta") = 0.5);
    m.def("config_json", [](const std::string& text) { return parse_config(text).to_json().dump(); },
          py::arg("text"));
    m.def(
        "check_null",
        [](const std::string& name) {
            const SystemSpec spec = catalog_get(name);
            const NullVerdict v = check_null_conditions(spec);
            nlohmann::json j = v.to_json();
            j["null_conditions_hold"] = v.null_conditions_hold();
            j["declared_null"] = spec.declared_null;
            return j.dump();
        },
        py::arg("model"));
    m.def("solve", &solve, py::arg("config"));
    m.def("energies", &energies, py::arg("config"));
    m.def("run_subcommand", &run_subcommand, py::arg("subcommand"), py::arg("config"), py::arg("out_dir"));
}
