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

#ifndef MSMS_CLUSTERING_HPP
#define MSMS_CLUSTERING_HPP

#include "msms/types.hpp"

#include <string>
#include <vector>

namespace msms {

// Binary S x K satellite-UT association O.
class Association {
  public:
    Association() = default;
    Association(int num_sats, int num_uts);
    explicit Association(Eigen::MatrixXi o);

    int num_sats() const { return static_cast<int>(o_.rows()); }
    int num_uts() const { return static_cast<int>(o_.cols()); }
    bool serves(int s, int k) const { return o_(s, k) != 0; }
    void set(int s, int k, bool on) { o_(s, k) = on ? 1 : 0; }
    const Eigen::MatrixXi& matrix() const { return o_; }

    // Serving satellites of UT k, ascending index.
    std::vector<int> serving(int k) const;
    // UTs served by satellite s, ascending index.
    std::vector<int> served(int s) const;
    int serving_count(int k) const;
    int load(int s) const;

  private:
    Eigen::MatrixXi o_;
};

// Every satellite serves every UT.
Association full_association(int num_sats, int num_uts);

// Throws Error unless sum_s o_{s,k} = S_k (C1), sum_k o_{s,k} <= K_s^max (C2)
// and all entries are 0/1 (C5).
void check_association(const Association& a, const std::vector<int>& serving_per_ut,
                       const std::vector<int>& capacity);

// Pigeonhole / Gale-Ryser test for the existence of an O meeting C1, C2.
// Returns an empty string when feasible, otherwise the binding constraint.
std::string association_infeasibility(const std::vector<int>& serving_per_ut, const std::vector<int>& capacity,
                                      int num_sats);

struct ClusterStats {
    int evictions = 0;
    int forced = 0;        // associations made after a UT hit the failure threshold
    int removed = 0;       // redundant associations dropped
    int repaired = 0;      // associations placed by the final augmenting-path pass
    bool eviction_cap_hit = false;
};

// Competition-based user-centric clustering on the S x K power matrix gamma.
// fail_threshold <= 0 selects S - S_k + 1 per UT.
Association cluster(const RMat& gamma, const std::vector<int>& serving_per_ut, const std::vector<int>& capacity,
                    int fail_threshold = 0, ClusterStats* stats = nullptr);

Association cluster(const RMat& gamma, int serving_per_ut, int capacity, int fail_threshold = 0,
                    ClusterStats* stats = nullptr);

} // namespace msms

#endif
