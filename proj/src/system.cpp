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

#include "msms/system.hpp"

#include <numeric>
#include <string>

namespace msms {

double System::per_ut_budget() const {
    if (num_uts < 1) {
        throw Error("System: no UTs");
    }
    return std::accumulate(sat_power.begin(), sat_power.end(), 0.0) / num_uts;
}

RMat System::gamma_matrix() const {
    RMat g(num_sats, num_uts);
    for (int s = 0; s < num_sats; ++s) {
        for (int k = 0; k < num_uts; ++k) {
            g(s, k) = link(s, k).gamma;
        }
    }
    return g;
}

void System::validate() const {
    if (num_sats < 1 || num_uts < 1) {
        throw Error("System: need at least one satellite and one UT");
    }
    if (static_cast<int>(links.size()) != num_sats * num_uts) {
        throw Error("System: link table must have S*K entries");
    }
    if (static_cast<int>(noise.size()) != num_uts || static_cast<int>(weights.size()) != num_uts ||
        static_cast<int>(streams.size()) != num_uts) {
        throw Error("System: per-UT vectors must have K entries");
    }
    if (static_cast<int>(sat_power.size()) != num_sats) {
        throw Error("System: need one power budget per satellite");
    }
    for (int k = 0; k < num_uts; ++k) {
        if (!(noise[k] > 0.0)) {
            throw Error("System: noise power of UT " + std::to_string(k) + " must be positive");
        }
        if (weights[k] < 0.0) {
            throw Error("System: negative rate weight for UT " + std::to_string(k));
        }
        if (streams[k] < 1 || streams[k] > rx.size()) {
            throw Error("System: UT " + std::to_string(k) + " needs 1 <= M_k <= N_R");
        }
    }
    for (double p : sat_power) {
        if (!(p > 0.0)) {
            throw Error("System: satellite power budgets must be positive");
        }
    }
    for (const auto& l : links) {
        if (!(l.tx == tx) || !(l.rx == rx)) {
            throw Error("System: link array shapes differ from the system arrays");
        }
        l.validate();
    }
}

} // namespace msms
