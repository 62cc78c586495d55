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

#ifndef MSMS_BEAM_SELECT_HPP
#define MSMS_BEAM_SELECT_HPP

#include "msms/beamspace.hpp"
#include "msms/clustering.hpp"
#include "msms/system.hpp"

#include <vector>

namespace msms {

// Two-stage selection per satellite. Stage 1 walks the served UTs by
// descending gamma and gives each its strongest still-unselected beam;
// stage 2 fills the remaining B_s - K_s slots with the beams of largest
// summed power sum_k gamma_{s,k} |v^T f_b|^2 over the served UTs.
// Ties go to the lowest beam index. Only closed-form beam gains are used.
std::vector<BeamPlan> lcms_select(const System& sys, const Association& assoc, const BeamCodebook& codebook,
                                  const std::vector<int>& beams_per_sat);

std::vector<BeamPlan> lcms_select(const System& sys, const Association& assoc, const BeamCodebook& codebook,
                                  int beams_per_sat);

// All Q_s beams in codebook order.
BeamPlan full_select(const BeamCodebook& codebook);

} // namespace msms

#endif
