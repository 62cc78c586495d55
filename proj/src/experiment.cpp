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

#include "msms/experiment.hpp"

#include "msms/beam_select.hpp"
#include "msms/clustering.hpp"

#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace msms {

std::string to_string(SweepAxis a) {
    switch (a) {
    case SweepAxis::TxPower: return "tx_power";
    case SweepAxis::Streams: return "streams";
    case SweepAxis::Uts: return "uts";
    case SweepAxis::RxAntennas: return "rx_antennas";
    case SweepAxis::ServingSats: return "serving_sats";
    case SweepAxis::Beams: return "beams";
    }
    return "?";
}

std::string to_string(PrecoderKind p) {
    switch (p) {
    case PrecoderKind::Dft: return "dft";
    case PrecoderKind::Lib: return "lib";
    case PrecoderKind::Cdm: return "cdm";
    case PrecoderKind::Cdwm: return "cdwm";
    }
    return "?";
}

std::string to_string(Selection s) { return s == Selection::Lcms ? "lcms" : "full"; }

SweepAxis parse_axis(const std::string& s) {
    for (auto a : {SweepAxis::TxPower, SweepAxis::Streams, SweepAxis::Uts, SweepAxis::RxAntennas,
                   SweepAxis::ServingSats, SweepAxis::Beams}) {
        if (to_string(a) == s) {
            return a;
        }
    }
    throw Error("unknown sweep axis '" + s + "'");
}

PrecoderKind parse_precoder(const std::string& s) {
    for (auto p : {PrecoderKind::Dft, PrecoderKind::Lib, PrecoderKind::Cdm, PrecoderKind::Cdwm}) {
        if (to_string(p) == s) {
            return p;
        }
    }
    throw Error("unknown precoder '" + s + "' (expected dft, lib, cdm or cdwm)");
}

Selection parse_selection(const std::string& s) {
    if (s == "lcms") {
        return Selection::Lcms;
    }
    if (s == "full") {
        return Selection::Full;
    }
    throw Error("unknown beam selection '" + s + "' (expected lcms or full)");
}

void Experiment::validate() const {
    base.validate();
    if (values.empty()) {
        throw Error("experiment: axis values must not be empty");
    }
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (!(values[i] > values[i - 1])) {
            throw Error("experiment: axis values must be strictly increasing");
        }
    }
    if (axis != SweepAxis::TxPower) {
        for (double v : values) {
            if (v != std::floor(v) || v < 1.0) {
                throw Error("experiment: axis '" + to_string(axis) + "' takes positive integer values");
            }
        }
    }
    if (precoders.empty()) {
        throw Error("experiment: precoder list must not be empty");
    }
    if (selections.empty()) {
        throw Error("experiment: selection list must not be empty");
    }
    if (seeds.empty()) {
        throw Error("experiment: seed list must not be empty");
    }
    if (trials < 1) {
        throw Error("experiment: trials must be >= 1");
    }
    if (cdwm.max_iterations < 1 || !(cdwm.chi > 0.0)) {
        throw Error("experiment: cdwm needs max_iterations >= 1 and chi > 0");
    }
}

namespace {

void reject_unknown(const YAML::Node& map, const std::set<std::string>& known, const std::string& where) {
    if (!map.IsMap()) {
        throw Error("config: '" + where + "' must be a mapping");
    }
    for (const auto& kv : map) {
        const auto key = kv.first.as<std::string>();
        if (!known.count(key)) {
            throw Error("config: unknown key '" + key + "' in " + where);
        }
    }
}

template <typename T>
void read(const YAML::Node& n, const char* key, T& out) {
    if (n[key]) {
        try {
            out = n[key].as<T>();
        } catch (const YAML::Exception& e) {
            throw Error(std::string("config: bad value for '") + key + "': " + e.what());
        }
    }
}

void read_shape(const YAML::Node& n, const char* key, ArrayShape& out) {
    if (!n[key]) {
        return;
    }
    const auto v = n[key].as<std::vector<int>>();
    if (v.size() != 2) {
        throw Error(std::string("config: '") + key + "' must be [vertical, horizontal]");
    }
    out = ArrayShape{v[0], v[1]};
}

template <typename T>
std::vector<T> scalar_or_list(const YAML::Node& n) {
    if (n.IsSequence()) {
        return n.as<std::vector<T>>();
    }
    return {n.as<T>()};
}

ScenarioConfig parse_scenario(const YAML::Node& n) {
    ScenarioConfig c;
    if (!n) {
        return c;
    }
    reject_unknown(n,
                   {"num_satellites", "num_uts", "serving_per_ut", "max_uts_per_sat", "tx_array", "rx_array",
                    "streams_per_ut", "beams_per_sat", "carrier_freq_hz", "subcarrier_spacing_hz", "tx_power_dbm",
                    "coverage_radius_m", "altitude_m", "phase_error_var", "rician_k_db", "noise_figure_db",
                    "antenna_temp_k", "tx_element_gain_dbi", "rx_gain_dbi", "min_elevation_deg", "nlos_convention"},
                   "scenario");
    read(n, "num_satellites", c.num_satellites);
    read(n, "num_uts", c.num_uts);
    read(n, "serving_per_ut", c.serving_per_ut);
    read(n, "max_uts_per_sat", c.max_uts_per_sat);
    read_shape(n, "tx_array", c.tx_array);
    read_shape(n, "rx_array", c.rx_array);
    read(n, "streams_per_ut", c.streams_per_ut);
    read(n, "beams_per_sat", c.beams_per_sat);
    read(n, "carrier_freq_hz", c.carrier_freq);
    read(n, "subcarrier_spacing_hz", c.subcarrier_spacing);
    if (n["tx_power_dbm"]) {
        c.tx_power_per_sat = dbm_to_watt(n["tx_power_dbm"].as<double>());
    }
    read(n, "coverage_radius_m", c.coverage_radius);
    read(n, "altitude_m", c.altitude);
    read(n, "phase_error_var", c.phase_error_var);
    if (n["rician_k_db"]) {
        const auto v = n["rician_k_db"].as<std::vector<double>>();
        if (v.size() != 2) {
            throw Error("config: 'rician_k_db' must be [min, max]");
        }
        c.rician_k_db_min = v[0];
        c.rician_k_db_max = v[1];
    }
    read(n, "noise_figure_db", c.noise_figure_db);
    read(n, "antenna_temp_k", c.antenna_temp);
    read(n, "tx_element_gain_dbi", c.tx_element_gain_dbi);
    read(n, "rx_gain_dbi", c.rx_gain_dbi);
    read(n, "min_elevation_deg", c.min_elevation_deg);
    if (n["nlos_convention"]) {
        const auto s = n["nlos_convention"].as<std::string>();
        if (s == "normalized") {
            c.nlos_convention = NlosConvention::Normalized;
        } else if (s == "paper_literal") {
            c.nlos_convention = NlosConvention::PaperLiteral;
        } else {
            throw Error("config: nlos_convention must be normalized or paper_literal");
        }
    }
    return c;
}

} // namespace

Experiment parse_experiment(const std::string& yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml_text);
    } catch (const YAML::Exception& e) {
        throw Error(std::string("config: YAML parse error: ") + e.what());
    }
    if (!root || !root.IsMap()) {
        throw Error("config: top level must be a mapping");
    }
    reject_unknown(root, {"schema_version", "scenario", "experiment"}, "top level");
    if (!root["schema_version"]) {
        throw Error("config: missing schema_version");
    }
    const int version = root["schema_version"].as<int>();
    if (version != kSchemaVersion) {
        throw Error("config: unsupported schema_version " + std::to_string(version) + " (expected " +
                    std::to_string(kSchemaVersion) + ")");
    }
    Experiment e;
    try {
        e.base = parse_scenario(root["scenario"]);
        const YAML::Node x = root["experiment"];
        if (!x) {
            throw Error("config: missing experiment section");
        }
        reject_unknown(x,
                       {"axis", "values", "precoders", "selection", "seeds", "trials", "keep_cross_terms",
                        "fail_threshold", "cdwm", "output"},
                       "experiment");
        if (!x["axis"] || !x["values"] || !x["precoders"]) {
            throw Error("config: experiment needs axis, values and precoders");
        }
        e.axis = parse_axis(x["axis"].as<std::string>());
        e.values = scalar_or_list<double>(x["values"]);
        e.precoders.clear();
        for (const auto& p : scalar_or_list<std::string>(x["precoders"])) {
            e.precoders.push_back(parse_precoder(p));
        }
        if (x["selection"]) {
            e.selections.clear();
            for (const auto& s : scalar_or_list<std::string>(x["selection"])) {
                e.selections.push_back(parse_selection(s));
            }
        }
        if (x["seeds"]) {
            e.seeds = scalar_or_list<std::uint64_t>(x["seeds"]);
        }
        read(x, "trials", e.trials);
        read(x, "keep_cross_terms", e.keep_cross_terms);
        read(x, "fail_threshold", e.fail_threshold);
        read(x, "output", e.output);
        if (const YAML::Node c = x["cdwm"]) {
            reject_unknown(c, {"max_iterations", "tolerance", "chi", "init", "seed"}, "experiment.cdwm");
            read(c, "max_iterations", e.cdwm.max_iterations);
            read(c, "tolerance", e.cdwm.tolerance);
            read(c, "chi", e.cdwm.chi);
            read(c, "seed", e.cdwm.seed);
            if (c["init"]) {
                const auto s = c["init"].as<std::string>();
                if (s == "cdm") {
                    e.cdwm.init = CdwmInit::Cdm;
                } else if (s == "random") {
                    e.cdwm.init = CdwmInit::Random;
                } else {
                    throw Error("config: cdwm.init must be cdm or random");
                }
            }
        }
    } catch (const YAML::Exception& ex) {
        throw Error(std::string("config: ") + ex.what());
    }
    e.validate();
    return e;
}

Experiment load_experiment(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open config file '" + path + "'");
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment(ss.str());
}

ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis, double value) {
    ScenarioConfig c = base;
    const int n = static_cast<int>(std::lround(value));
    switch (axis) {
    case SweepAxis::TxPower: c.tx_power_per_sat = dbm_to_watt(value); break;
    case SweepAxis::Streams: c.streams_per_ut = n; break;
    case SweepAxis::Uts: c.num_uts = n; break;
    case SweepAxis::RxAntennas: c.rx_array = ArrayShape{n, n}; break;
    case SweepAxis::ServingSats: c.serving_per_ut = n; break;
    case SweepAxis::Beams: c.beams_per_sat = n; break;
    }
    return c;
}

Snapshot make_snapshot(const ScenarioConfig& config, Selection selection, int fail_threshold) {
    Snapshot snap;
    snap.config = config;
    snap.geometry = generate_scenario(config);
    snap.system = build_system(snap.geometry, config);
    snap.association = cluster(snap.system.gamma_matrix(), config.serving_per_ut, config.max_uts_per_sat,
                               fail_threshold);
    snap.codebook = dft_codebook(config.tx_array);
    std::vector<BeamPlan> plans;
    if (selection == Selection::Lcms) {
        plans = lcms_select(snap.system, snap.association, snap.codebook, config.beams_per_sat);
    } else {
        plans.assign(config.num_satellites, full_select(snap.codebook));
    }
    snap.beams = make_beam_domain(snap.system.links, snap.system.num_sats, snap.system.num_uts, snap.codebook,
                                  std::move(plans));
    return snap;
}

PrecoderSet run_precoder(const PrecodingContext& ctx, PrecoderKind kind, const CdwmOptions& cdwm) {
    switch (kind) {
    case PrecoderKind::Dft: return dft_baseline(ctx);
    case PrecoderKind::Lib: return lib_precoder(ctx);
    case PrecoderKind::Cdm: return cdm_precoder(ctx);
    case PrecoderKind::Cdwm: return cdwmmse(ctx, cdwm);
    }
    throw Error("run_precoder: unknown precoder");
}

namespace {

// One scenario draw shared by every precoder in the list, so all precoders
// see the same geometry, association, beams and evaluation draws.
void run_job(const Experiment& exp, const RunOptions& opt, std::size_t vi, std::size_t si, std::size_t di,
             std::vector<CellResult>& out) {
    const std::size_t np = exp.precoders.size();
    for (std::size_t pi = 0; pi < np; ++pi) {
        CellResult& c = out[pi];
        c.value_index = vi;
        c.precoder_index = pi;
        c.selection_index = si;
        c.seed_index = di;
        c.value = exp.values[vi];
        c.precoder = exp.precoders[pi];
        c.selection = exp.selections[si];
        c.seed = exp.seeds[di];
    }
    try {
        ScenarioConfig cfg = apply_axis(exp.base, exp.axis, exp.values[vi]);
        cfg.rng_seed = exp.seeds[di];
        const Snapshot snap = make_snapshot(cfg, exp.selections[si], exp.fail_threshold);
        const PrecodingContext ctx(snap.system, snap.association, snap.beams);
        EvalOptions eo;
        eo.trials = exp.trials;
        eo.seed = exp.seeds[di];
        eo.keep_cross_terms = exp.keep_cross_terms;
        for (std::size_t pi = 0; pi < np; ++pi) {
            CellResult& c = out[pi];
            try {
                const auto t0 = std::chrono::steady_clock::now();
                const PrecoderSet p = run_precoder(ctx, exp.precoders[pi], exp.cdwm);
                const auto t1 = std::chrono::steady_clock::now();
                c.wall_ms = opt.timing ? std::chrono::duration<double, std::milli>(t1 - t0).count() : 0.0;
                c.iterations = p.iterations;
                c.report = mc_sum_rate(ctx, p, eo);
                for (int s = 0; s < snap.system.num_sats; ++s) {
                    c.sat_power.push_back(p.sat_power(s));
                    c.sat_budget.push_back(snap.system.sat_power[s]);
                }
                c.ok = true;
            } catch (const std::exception& ex) {
                c.error = ex.what();
            }
        }
    } catch (const std::exception& ex) {
        for (std::size_t pi = 0; pi < np; ++pi) {
            out[pi].error = ex.what();
        }
    }
}

} // namespace

ExperimentResult run_experiment(const Experiment& exp, const RunOptions& opt) {
    exp.validate();
    struct Job {
        std::size_t vi, si, di;
    };
    std::vector<Job> jobs;
    for (std::size_t vi = 0; vi < exp.values.size(); ++vi) {
        for (std::size_t si = 0; si < exp.selections.size(); ++si) {
            for (std::size_t di = 0; di < exp.seeds.size(); ++di) {
                jobs.push_back({vi, si, di});
            }
        }
    }
    std::vector<std::vector<CellResult>> slots(jobs.size(), std::vector<CellResult>(exp.precoders.size()));
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
            run_job(exp, opt, jobs[i].vi, jobs[i].si, jobs[i].di, slots[i]);
        }
    };
    const int nthreads = std::max(1, std::min<int>(opt.threads, static_cast<int>(jobs.size())));
    if (nthreads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < nthreads; ++t) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    ExperimentResult res;
    res.axis = exp.axis;
    for (auto& s : slots) {
        for (auto& c : s) {
            res.cells.push_back(std::move(c));
        }
    }
    std::sort(res.cells.begin(), res.cells.end(), [](const CellResult& a, const CellResult& b) {
        return std::tie(a.value_index, a.precoder_index, a.selection_index, a.seed_index) <
               std::tie(b.value_index, b.precoder_index, b.selection_index, b.seed_index);
    });
    for (const auto& c : res.cells) {
        if (!c.ok) {
            ++res.failed;
            spdlog::error("cell {}={} precoder={} selection={} seed={} failed: {}", to_string(exp.axis),
                          format_double(c.value), to_string(c.precoder), to_string(c.selection), c.seed, c.error);
        }
    }
    return res;
}

std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, r.ptr);
}

namespace {

std::ofstream open_out(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error("cannot write '" + path + "'");
    }
    return out;
}

std::string cell_prefix(const ExperimentResult& r, const CellResult& c) {
    return to_string(r.axis) + "," + format_double(c.value) + "," + to_string(c.precoder) + "," +
           to_string(c.selection) + "," + std::to_string(c.seed) + ",";
}

} // namespace

void write_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out = open_out(path);
    out << kCsvHeader << '\n';
    for (const auto& c : result.cells) {
        if (!c.ok) {
            continue;
        }
        const std::string prefix = cell_prefix(result, c);
        const std::string tail = "," + std::to_string(c.iterations) + "," + format_double(c.wall_ms) + "\n";
        for (std::size_t k = 0; k < c.report.mc.size(); ++k) {
            out << prefix << k << ',' << format_double(c.report.mc[k]) << ',' << format_double(c.report.mc_stderr[k])
                << ',' << format_double(c.report.ubound[k]) << tail;
        }
        out << prefix << "sum," << format_double(c.report.sum_mc) << ',' << format_double(c.report.sum_stderr) << ','
            << format_double(c.report.sum_ubound) << tail;
    }
    if (!out) {
        throw Error("error while writing '" + path + "'");
    }
}

void write_power_csv(const ExperimentResult& result, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "axis,value,precoder,selection,seed,sat_id,power_w,budget_w\n";
    for (const auto& c : result.cells) {
        if (!c.ok) {
            continue;
        }
        const std::string prefix = cell_prefix(result, c);
        for (std::size_t s = 0; s < c.sat_power.size(); ++s) {
            out << prefix << s << ',' << format_double(c.sat_power[s]) << ',' << format_double(c.sat_budget[s])
                << '\n';
        }
    }
    if (!out) {
        throw Error("error while writing '" + path + "'");
    }
}

int check_power_csv(const std::string& path, double rel_slack) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot read '" + path + "'");
    }
    std::string line;
    std::getline(in, line);
    int bad = 0;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::vector<std::string> f;
        std::stringstream ss(line);
        for (std::string tok; std::getline(ss, tok, ',');) {
            f.push_back(tok);
        }
        if (f.size() != 8) {
            throw Error("malformed power row: " + line);
        }
        double power = 0.0, budget = 0.0;
        std::from_chars(f[6].data(), f[6].data() + f[6].size(), power);
        std::from_chars(f[7].data(), f[7].data() + f[7].size(), budget);
        if (power > budget * (1.0 + rel_slack)) {
            ++bad;
        }
    }
    return bad;
}

std::string power_csv_path(const std::string& csv_path) {
    std::filesystem::path p(csv_path);
    const std::string stem = p.stem().string();
    return (p.parent_path() / (stem + "_power.csv")).string();
}

} // namespace msms
