#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "smatv/netio.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

smatv::Scenario merged(const smatv::NetworkDocument& doc, const std::string& scenario) {
    smatv::Scenario s = doc.scenario.value_or(smatv::Scenario{});
    if (scenario.empty()) return s;
    auto extra = smatv::scenario_from_json(json::parse(scenario));
    for (const auto& [k, v] : extra.regulators) s.regulators[k] = v;
    for (const auto& [k, v] : extra.source_trims_db) s.source_trims_db[k] = v;
    return s;
}

smatv::SignalLine line_of(const std::string& name) {
    auto l = smatv::parse_signal_line(name);
    if (!l) throw py::value_error("unknown signal line '" + name + "'");
    return *l;
}

}  // namespace

PYBIND11_MODULE(_smatv, m) {
    m.doc() = "SMATV network simulation core";

    py::register_exception<smatv::Error>(m, "SmatvError", PyExc_ValueError);

    m.def("power_to_level", [](double dbm, int n) { return smatv::power_to_level(smatv::PowerDBm{dbm}, n).value; },
          py::arg("power_dbm"), py::arg("n_channels"));
    m.def(
        "cascade_cnr",
        [](double cn_in, int n, double u_out, double k, double nf) {
            return smatv::cascade_cnr(smatv::CNRatioDB(cn_in), n, smatv::LevelDBuV{u_out}, smatv::GainDB{k},
                                      smatv::NoiseFigureDB{nf})
                .value();
        },
        py::arg("cnr_in_db"), py::arg("n_amps"), py::arg("level_out_dbuv"), py::arg("gain_db"), py::arg("nf_db"));

    m.def("case_study", [] {
        auto doc = smatv::build_case_study();
        return smatv::serialize_network(doc.network, doc.scenario);
    });
    m.def("builtin_catalog", [] { return smatv::serialize_catalog(smatv::builtin_catalog()); });

    m.def(
        "validate",
        [](const std::string& text) {
            try {
                auto doc = smatv::parse_network(text);
                return smatv::diagnostics_to_json(smatv::validate_network(doc.network)).dump();
            } catch (const smatv::ValidationError& e) {
                return smatv::diagnostics_to_json(e.diagnostics()).dump();
            }
        },
        py::arg("network"));

    m.def(
        "simulate",
        [](const std::string& text, const std::string& scenario) {
            auto doc = smatv::parse_network(text);
            py::gil_scoped_release release;
            auto sim = smatv::propagate(doc.network, merged(doc, scenario));
            auto report = smatv::check_all(sim, doc.network, doc.network.constraints);
            return smatv::report_to_json(report, &sim).dump();
        },
        py::arg("network"), py::arg("scenario") = "");

    m.def(
        "sweep",
        [](const std::string& text, const std::string& line, const std::vector<double>& levels,
           const std::string& scenario) {
            auto doc = smatv::parse_network(text);
            py::gil_scoped_release release;
            return smatv::sweep_to_json(smatv::sweep_input_level(doc.network, line_of(line), levels, merged(doc, scenario)))
                .dump();
        },
        py::arg("network"), py::arg("line"), py::arg("levels"), py::arg("scenario") = "");

    m.def(
        "optimize",
        [](const std::string& text, std::size_t budget, std::uint64_t seed, const std::string& scenario) {
            auto doc = smatv::parse_network(text);
            py::gil_scoped_release release;
            auto r = smatv::optimize_gains(doc.network, doc.network.constraints, budget, seed, merged(doc, scenario));
            return smatv::optimize_to_json(r).dump();
        },
        py::arg("network"), py::arg("budget") = 100000, py::arg("seed") = 1, py::arg("scenario") = "");
}
