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

#include <catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace msms;

namespace {

const char* kSmall = R"(schema_version: 1
scenario:
  num_satellites: 3
  num_uts: 4
  serving_per_ut: 2
  max_uts_per_sat: 4
  tx_array: [4, 4]
  rx_array: [2, 2]
  streams_per_ut: 2
  beams_per_sat: 6
experiment:
  axis: tx_power
  values: [20, 30, 40, 50]
  precoders: [dft, cdwm]
  seeds: [1, 2]
  trials: 20
)";

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string tmp(const std::string& name) {
    return (std::filesystem::temp_directory_path() / ("msms_test_" + name)).string();
}

} // namespace

TEST_CASE("experiment YAML is parsed with defaults", "[experiment]") {
    const Experiment e = parse_experiment(kSmall);
    CHECK(e.base.num_satellites == 3);
    CHECK(e.base.tx_array == ArrayShape{4, 4});
    CHECK(e.axis == SweepAxis::TxPower);
    CHECK(e.values.size() == 4);
    CHECK(e.precoders == std::vector<PrecoderKind>{PrecoderKind::Dft, PrecoderKind::Cdwm});
    CHECK(e.selections == std::vector<Selection>{Selection::Lcms});
    CHECK(e.trials == 20);
    CHECK(e.base.carrier_freq == 2.0e9);
}

TEST_CASE("invalid experiment files are rejected", "[experiment]") {
    std::string s = kSmall;
    CHECK_THROWS_AS(parse_experiment(s + "  bogus: 1\n"), Error);
    CHECK_THROWS_AS(parse_experiment(s.substr(s.find('\n') + 1)), Error);
    std::string v2 = s;
    v2.replace(v2.find("schema_version: 1"), 17, "schema_version: 2");
    CHECK_THROWS_AS(parse_experiment(v2), Error);
    std::string empty = s;
    empty.replace(empty.find("[dft, cdwm]"), 11, "[]");
    CHECK_THROWS_AS(parse_experiment(empty), Error);
    std::string order = s;
    order.replace(order.find("[20, 30, 40, 50]"), 16, "[30, 20]");
    CHECK_THROWS_AS(parse_experiment(order), Error);
    std::string bad = s;
    bad.replace(bad.find("[dft, cdwm]"), 11, "[zf]");
    CHECK_THROWS_AS(parse_experiment(bad), Error);
    CHECK_THROWS_AS(load_experiment("/nonexistent/x.yaml"), Error);
}

TEST_CASE("axis values map onto the scenario", "[experiment]") {
    const ScenarioConfig b;
    CHECK(std::abs(apply_axis(b, SweepAxis::TxPower, 40.0).tx_power_per_sat - 10.0) < 1e-12);
    CHECK(apply_axis(b, SweepAxis::Streams, 3).streams_per_ut == 3);
    CHECK(apply_axis(b, SweepAxis::Uts, 7).num_uts == 7);
    CHECK(apply_axis(b, SweepAxis::RxAntennas, 3).rx_array == ArrayShape{3, 3});
    CHECK(apply_axis(b, SweepAxis::ServingSats, 2).serving_per_ut == 2);
    CHECK(apply_axis(b, SweepAxis::Beams, 64).beams_per_sat == 64);
}

TEST_CASE("doubles are written in shortest round-trip form", "[experiment]") {
    for (double v : {0.1, 1.0 / 3.0, 12345.678901234567, 1e-300, 0.0}) {
        const std::string s = format_double(v);
        CHECK(std::stod(s) == v);
    }
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("a sweep writes reproducible CSV with per-UT and sum rows", "[experiment]") {
    const Experiment e = parse_experiment(kSmall);
    const ExperimentResult r = run_experiment(e);
    CHECK(r.failed == 0);
    REQUIRE(r.cells.size() == 4 * 2 * 2);
    const std::string a = tmp("a.csv"), b = tmp("b.csv");
    write_csv(r, a);
    RunOptions two;
    two.threads = 2;
    write_csv(run_experiment(e, two), b);
    const std::string text = slurp(a);
    CHECK(text == slurp(b));
    std::istringstream in(text);
    std::string line;
    std::getline(in, line);
    CHECK(line == kCsvHeader);
    int rows = 0, sums = 0;
    std::map<std::string, std::vector<double>> by_seed;
    while (std::getline(in, line)) {
        ++rows;
        if (line.find(",sum,") != std::string::npos) {
            ++sums;
            std::vector<std::string> f;
            std::stringstream ss(line);
            for (std::string tok; std::getline(ss, tok, ',');) {
                f.push_back(tok);
            }
            REQUIRE(f.size() == 11);
            by_seed[f[2] + "/" + f[4]].push_back(std::stod(f[6]));
        }
    }
    CHECK(sums == 16);
    CHECK(rows == 16 * 5);
    for (const auto& [key, rates] : by_seed) {
        INFO(key);
        REQUIRE(rates.size() == 4);
        for (std::size_t i = 1; i < rates.size(); ++i) {
            CHECK(rates[i] >= rates[i - 1]);
        }
    }
    const std::string pw = power_csv_path(a);
    CHECK(pw == tmp("a_power.csv"));
    write_power_csv(r, pw);
    CHECK(check_power_csv(pw) == 0);
}

TEST_CASE("power check flags rows above budget", "[experiment]") {
    const std::string p = tmp("bad_power.csv");
    {
        std::ofstream out(p);
        out << "axis,value,precoder,selection,seed,sat_id,power_w,budget_w\n";
        out << "tx_power,30,cdwm,lcms,1,0,1.0000001,1\n";
        out << "tx_power,30,cdwm,lcms,1,1,1,1\n";
    }
    CHECK(check_power_csv(p) == 1);
}

TEST_CASE("a failing cell is logged and the sweep continues", "[experiment]") {
    Experiment e = parse_experiment(kSmall);
    e.axis = SweepAxis::Beams;
    e.values = {1, 6}; // one beam cannot cover the served UTs
    e.seeds = {1};
    e.trials = 5;
    const ExperimentResult r = run_experiment(e);
    CHECK(r.failed == 2);
    int ok = 0;
    for (const auto& c : r.cells) {
        ok += c.ok;
    }
    CHECK(ok == 2);
    CHECK_THROWS_AS(write_csv(r, "/proc/definitely/not/writable.csv"), Error);
}
