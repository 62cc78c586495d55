// SPDX-License-Identifier: Apache-2.0
//
// msms-beamspace: multi-satellite multi-stream beamspace MIMO simulation
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#include "msms/beam_select.hpp"
#include "msms/clustering.hpp"
#include "msms/eval.hpp"
#include "msms/experiment.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace msms;

namespace {

std::pair<int, int> shape_pair(ArrayShape s) { return {s.vertical, s.horizontal}; }
ArrayShape to_shape(std::pair<int, int> p) { return {p.first, p.second}; }

py::dict simulate(const ScenarioConfig& config, const std::string& precoder, const std::string& selection,
                  int trials, std::uint64_t eval_seed, bool keep_cross_terms, int max_iterations, double tolerance) {
    const Snapshot snap = make_snapshot(config, parse_selection(selection));
    const PrecodingContext ctx(snap.system, snap.association, snap.beams);
    CdwmOptions opt;
    opt.max_iterations = max_iterations;
    opt.tolerance = tolerance;
    const PrecoderSet p = run_precoder(ctx, parse_precoder(precoder), opt);
    EvalOptions eo;
    eo.trials = trials;
    eo.seed = eval_seed;
    eo.keep_cross_terms = keep_cross_terms;
    const RateReport r = mc_sum_rate(ctx, p, eo);
    std::vector<double> power, budget;
    for (int s = 0; s < snap.system.num_sats; ++s) {
        power.push_back(p.sat_power(s));
        budget.push_back(snap.system.sat_power[s]);
    }
    std::vector<std::vector<int>> beams;
    for (const auto& plan : snap.beams.plans()) {
        beams.push_back(plan.beams);
    }
    py::dict d;
    d["rate_mc"] = r.mc;
    d["rate_stderr"] = r.mc_stderr;
    d["rate_ubound"] = r.ubound;
    d["sum_rate_mc"] = r.sum_mc;
    d["sum_rate_stderr"] = r.sum_stderr;
    d["sum_rate_ubound"] = r.sum_ubound;
    d["iterations"] = p.iterations;
    d["converged"] = p.converged;
    d["trace"] = p.trace;
    d["sat_power"] = power;
    d["sat_budget"] = budget;
    d["association"] = Eigen::MatrixXi(snap.association.matrix());
    d["beams"] = beams;
    d["gamma"] = snap.system.gamma_matrix();
    return d;
}

int run_yaml(const std::string& yaml_text, const std::string& out, int threads) {
    Experiment e = parse_experiment(yaml_text);
    if (!out.empty()) {
        e.output = out;
    }
    if (e.output.empty()) {
        throw Error("no output path");
    }
    RunOptions ro;
    ro.threads = threads;
    const ExperimentResult r = run_experiment(e, ro);
    write_csv(r, e.output);
    write_power_csv(r, power_csv_path(e.output));
    return r.failed;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Multi-satellite multi-stream beamspace precoding simulator";
    py::register_exception<Error>(m, "MsmsError", PyExc_ValueError);

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def(py::init<>())
        .def_readwrite("num_satellites", &ScenarioConfig::num_satellites)
        .def_readwrite("num_uts", &ScenarioConfig::num_uts)
        .def_readwrite("serving_per_ut", &ScenarioConfig::serving_per_ut)
        .def_readwrite("max_uts_per_sat", &ScenarioConfig::max_uts_per_sat)
        .def_property(
            "tx_array", [](const ScenarioConfig& c) { return shape_pair(c.tx_array); },
            [](ScenarioConfig& c, std::pair<int, int> p) { c.tx_array = to_shape(p); })
        .def_property(
            "rx_array", [](const ScenarioConfig& c) { return shape_pair(c.rx_array); },
            [](ScenarioConfig& c, std::pair<int, int> p) { c.rx_array = to_shape(p); })
        .def_readwrite("streams_per_ut", &ScenarioConfig::streams_per_ut)
        .def_readwrite("beams_per_sat", &ScenarioConfig::beams_per_sat)
        .def_readwrite("carrier_freq", &ScenarioConfig::carrier_freq)
        .def_readwrite("subcarrier_spacing", &ScenarioConfig::subcarrier_spacing)
        .def_readwrite("tx_power_per_sat", &ScenarioConfig::tx_power_per_sat, "W per subcarrier")
        .def_property(
            "tx_power_dbm", [](const ScenarioConfig& c) { return linear_to_db(c.tx_power_per_sat) + 30.0; },
            [](ScenarioConfig& c, double dbm) { c.tx_power_per_sat = dbm_to_watt(dbm); })
        .def_readwrite("coverage_radius", &ScenarioConfig::coverage_radius)
        .def_readwrite("altitude", &ScenarioConfig::altitude)
        .def_readwrite("phase_error_var", &ScenarioConfig::phase_error_var)
        .def_readwrite("rician_k_db_min", &ScenarioConfig::rician_k_db_min)
        .def_readwrite("rician_k_db_max", &ScenarioConfig::rician_k_db_max)
        .def_readwrite("noise_figure_db", &ScenarioConfig::noise_figure_db)
        .def_readwrite("min_elevation_deg", &ScenarioConfig::min_elevation_deg)
        .def_readwrite("seed", &ScenarioConfig::rng_seed)
        .def("validate", &ScenarioConfig::validate);

    m.def("simulate", &simulate, py::arg("config"), py::arg("precoder") = "cdwm", py::arg("selection") = "lcms",
          py::arg("trials") = 100, py::arg("eval_seed") = 0, py::arg("keep_cross_terms") = false,
          py::arg("max_iterations") = 50, py::arg("tolerance") = 1e-3,
          "Scenario, clustering, beam selection, precoding and Monte-Carlo evaluation for one seed.");

    m.def(
        "upa_steering", [](double theta, double phi, std::pair<int, int> shape) {
            return upa_steering(theta, phi, to_shape(shape));
        },
        py::arg("theta"), py::arg("phi"), py::arg("shape"));
    m.def(
        "dft_codebook", [](std::pair<int, int> shape) { return dft_codebook(to_shape(shape)).f; }, py::arg("shape"));
    m.def(
        "beam_gain",
        [](double gamma, double theta, double phi, double grid_v, double grid_h, std::pair<int, int> shape) {
            return beam_gain(gamma, theta, phi, grid_v, grid_h, to_shape(shape));
        },
        py::arg("gamma"), py::arg("theta"), py::arg("phi"), py::arg("grid_v"), py::arg("grid_h"), py::arg("shape"));
    m.def(
        "cluster",
        [](const RMat& gamma, int serving, int capacity, int fail_threshold) {
            return Eigen::MatrixXi(cluster(gamma, serving, capacity, fail_threshold).matrix());
        },
        py::arg("gamma"), py::arg("serving_per_ut"), py::arg("max_uts_per_sat"), py::arg("fail_threshold") = 0,
        "S x K 0/1 association from the S x K channel power matrix.");
    m.def("log2det_rate", &log2det_rate, py::arg("g"), py::arg("r_other"));
    m.def("run_experiment", &run_yaml, py::arg("yaml_text"), py::arg("out") = "", py::arg("threads") = 1,
          "Runs an experiment document and writes the CSV and power sidecar; returns the failed-cell count.");
    m.attr("CSV_HEADER") = kCsvHeader;
    m.attr("SCHEMA_VERSION") = kSchemaVersion;
}
