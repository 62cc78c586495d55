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

#ifndef MSMS_BEAMSPACE_HPP
#define MSMS_BEAMSPACE_HPP

#include "msms/channel.hpp"
#include "msms/types.hpp"

#include <vector>

namespace msms {

// DFT codebook F = (F~_NV (x) F~_NH)^*, F~_N[:, n] = v_N(-1 + 2n/N), n = 0..N-1.
// Column q = nv * N_H + nh points at the grid point (grid_v[nv], grid_h[nh]).
struct BeamCodebook {
    ArrayShape shape;
    CMat f;                  // N_T x Q
    std::vector<double> grid_v; // varpi, one per vertical index
    std::vector<double> grid_h; // varpi~, one per horizontal index

    int size() const { return static_cast<int>(f.cols()); }
    double grid_v_of(int beam) const { return grid_v[beam / shape.horizontal]; }
    double grid_h_of(int beam) const { return grid_h[beam % shape.horizontal]; }
};

// Selected beam indices of one satellite, in selection order (A_s in index form).
struct BeamPlan {
    std::vector<int> beams;

    int size() const { return static_cast<int>(beams.size()); }
};

BeamCodebook dft_codebook(ArrayShape shape);

// Throws if any index is out of [0, q) or repeated.
void validate_plan(const BeamPlan& plan, int codebook_size);

// H F A, column b equals H f_{plan[b]}.
CMat effective_channel(const CMat& h, const BeamCodebook& codebook, const BeamPlan& plan);

// sin(pi x) / (pi x) with the removable singularity at 0.
double sinc(double x);

// |sinc(N t) / sinc(t)|, the magnitude of a 1-D DFT inner product
// |v_N(x)^T conj(v_N(w))| at t = (x - w) / 2.
double array_factor(int n, double t);

// ||H f_b||^2 for a pure-LoS link, gamma |v^T f_b|^2, evaluated in closed form
// from the departure angles and the beam grid point.
double beam_gain(double gamma, double theta_tx, double phi_tx, double grid_v, double grid_h,
                 ArrayShape shape);

double beam_gain(const SCSI& link, const BeamCodebook& codebook, int beam);

// Beam-domain transmit steering v_bar^T = v^T F A for every (satellite, UT)
// link, plus the plans it was built from.
class BeamDomain {
  public:
    BeamDomain() = default;
    BeamDomain(int num_sats, int num_uts, std::vector<BeamPlan> plans, std::vector<CVec> vbar);

    int num_sats() const { return num_sats_; }
    int num_uts() const { return num_uts_; }
    int beams(int s) const { return plans_[s].size(); }
    int total_beams() const;
    const BeamPlan& plan(int s) const { return plans_[s]; }
    const std::vector<BeamPlan>& plans() const { return plans_; }
    // v_bar_{s,k}, length B_s
    const CVec& vbar(int s, int k) const { return vbar_[s * num_uts_ + k]; }

  private:
    int num_sats_ = 0;
    int num_uts_ = 0;
    std::vector<BeamPlan> plans_;
    std::vector<CVec> vbar_;
};

// v_bar_{s,k}[b] = v_{s,k}^T f_{plan_s[b]}; links indexed [s * K + k].
BeamDomain make_beam_domain(const std::vector<SCSI>& links, int num_sats, int num_uts,
                            const BeamCodebook& codebook, std::vector<BeamPlan> plans);

} // namespace msms

#endif
