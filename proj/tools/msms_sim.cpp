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

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdint>
#include <exception>
#include <string>
#include <vector>

int main(int argc, char** argv) {
    CLI::App app{"Multi-satellite beamspace precoding sweep runner"};
    std::string config;
    std::string out;
    int threads = 1;
    int trials = 0;
    std::vector<std::uint64_t> seeds;
    bool timing = false;
    std::string level = "info";
    app.add_option("--config", config, "Experiment YAML file")->required()->check(CLI::ExistingFile);
    app.add_option("--out", out, "Output CSV (overrides experiment.output)");
    app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--trials", trials, "Monte Carlo trials per cell (overrides config)")->check(CLI::PositiveNumber);
    app.add_option("--seeds", seeds, "Scenario seeds, comma separated (overrides config)")->delimiter(',');
    app.add_flag("--timing", timing, "Record wall time per cell (output no longer byte-reproducible)");
    app.add_option("--log-level", level, "trace, debug, info, warn, error, off");
    CLI11_PARSE(app, argc, argv);

    spdlog::set_level(spdlog::level::from_str(level));
    try {
        msms::Experiment exp = msms::load_experiment(config);
        if (!out.empty()) {
            exp.output = out;
        }
        if (exp.output.empty()) {
            throw msms::Error("no output path: set experiment.output or pass --out");
        }
        if (trials > 0) {
            exp.trials = trials;
        }
        if (!seeds.empty()) {
            exp.seeds = seeds;
        }
        exp.validate();
        msms::RunOptions opt;
        opt.threads = threads;
        opt.timing = timing;
        spdlog::info("axis={} values={} precoders={} seeds={} trials={}", msms::to_string(exp.axis),
                     exp.values.size(), exp.precoders.size(), exp.seeds.size(), exp.trials);
        const msms::ExperimentResult res = msms::run_experiment(exp, opt);
        msms::write_csv(res, exp.output);
        const std::string power = msms::power_csv_path(exp.output);
        msms::write_power_csv(res, power);
        const int over = msms::check_power_csv(power);
        if (over > 0) {
            spdlog::error("{} satellite power rows exceed their budget", over);
            return 3;
        }
        spdlog::info("wrote {} ({} cells, {} failed)", exp.output, res.cells.size(), res.failed);
        return res.failed == static_cast<int>(res.cells.size()) ? 2 : 0;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return 1;
    }
}
