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

#ifndef MSMS_SYSTEM_HPP
#define MSMS_SYSTEM_HPP

#include "msms/channel.hpp"
#include "msms/types.hpp"

#include <vector>

namespace msms {

// Everything the precoders need to know about one snapshot of the
// constellation: sCSI per satellite-UT link plus per-UT and per-satellite
// scalars.
struct System {
    int num_sats = 0;
    int num_uts = 0;
    ArrayShape tx;
    ArrayShape rx;
    std::vector<SCSI> links;        // [s * K + k]
    std::vector<double> noise;      // sigma_k^2, W
    std::vector<double> weights;    // beta_k
    std::vector<int> streams;       // M_k
    std::vector<double> sat_power;  // P_s, W

    const SCSI& link(int s, int k) const { return links[s * num_uts + k]; }
    SCSI& link(int s, int k) { return links[s * num_uts + k]; }

    // P~_k = (sum_s P_s) / K
    double per_ut_budget() const;

    // S x K matrix of gamma_{s,k}.
    RMat gamma_matrix() const;

    void validate() const;
};

} // namespace msms

#endif
