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

#ifndef MSMS_EXPERIMENT_HPP
#define MSMS_EXPERIMENT_HPP

#include "msms/eval.hpp"
#include "msms/precoding.hpp"
#include "msms/scenario.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace msms {

inline constexpr int kSchemaVersion = 1;

enum class SweepAxis { TxPower, Streams, Uts, RxAntennas, ServingSats, Beams };
enum class PrecoderKind { Dft, Lib, Cdm, Cdwm };
enum class Selection { Lcms, Full };

std::string to_string(SweepAxis a);
std::string to_string(PrecoderKind p);
std::string to_string(Selection s);
SweepAxis parse_axis(const std::string& s);
PrecoderKind parse_precoder(const std::string& s);
Selection parse_selection(const std::string& s);

struct Experiment {
    ScenarioConfig base;
    SweepAxis axis = SweepAxis::TxPower;
    std::vector<double> values;
    std::vector<PrecoderKind> precoders;
    std::vector<Selection> selections{Selection::Lcms};
    std::vector<std::uint64_t> seeds{1};
    int trials = 500;
    CdwmOptions cdwm;
    bool keep_cross_terms = false;
    int fail_threshold = 0; // 0: S - S_k + 1
    std::string output;

    void validate() const;
};

// YAML document with schema_version, scenario and experiment sections.
// Unknown keys are rejected. tx_power is given in dBm.
Experiment parse_experiment(const std::string& yaml_text);
Experiment load_experiment(const std::string& path);

// Base config with the sweep axis set to value (dBm for tx_power, counts
// otherwise; rx_antennas sets N_RV = N_RH = value).
ScenarioConfig apply_axis(const ScenarioConfig& base, SweepAxis axis, double value);

// Everything upstream of precoding for one scenario draw.
struct Snapshot {
    ScenarioConfig config;
    Geometry geometry;
    System system;
    Association association;
    BeamCodebook codebook;
    BeamDomain beams;
};

Snapshot make_snapshot(const ScenarioConfig& config, Selection selection, int fail_threshold = 0);

PrecoderSet run_precoder(const PrecodingContext& ctx, PrecoderKind kind, const CdwmOptions& cdwm);

struct CellResult {
    std::size_t value_index = 0;
    std::size_t precoder_index = 0;
    std::size_t selection_index = 0;
    std::size_t seed_index = 0;
    double value = 0.0;
    PrecoderKind precoder = PrecoderKind::Cdwm;
    Selection selection = Selection::Lcms;
    std::uint64_t seed = 0;
    bool ok = false;
    std::string error;
    RateReport report;
    int iterations = 0;
    double wall_ms = 0.0;
    std::vector<double> sat_power;
    std::vector<double> sat_budget;
};

struct RunOptions {
    int threads = 1;
    bool timing = false; // record wall time; off keeps output byte-reproducible
};

struct ExperimentResult {
    SweepAxis axis = SweepAxis::TxPower;
    std::vector<CellResult> cells; // sorted by (value, precoder, selection, seed)
    int failed = 0;
};

ExperimentResult run_experiment(const Experiment& exp, const RunOptions& opt = {});

// Shortest representation that parses back to the same double.
std::string format_double(double v);

inline constexpr const char* kCsvHeader =
    "axis,value,precoder,selection,seed,ut_id,rate_mc,rate_stderr,rate_ubound,iters,wall_ms";

void write_csv(const ExperimentResult& result, const std::string& path);

// Sidecar with per-satellite transmit power and budget of every cell.
void write_power_csv(const ExperimentResult& result, const std::string& path);

// Re-reads a power sidecar and returns the number of rows with
// power > budget (1 + rel_slack).
int check_power_csv(const std::string& path, double rel_slack = 1e-9);

// <dir>/<stem>_power.csv for an output path <dir>/<stem>.csv
std::string power_csv_path(const std::string& csv_path);

} // namespace msms

#endif
