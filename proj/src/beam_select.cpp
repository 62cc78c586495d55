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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace msms {

namespace {

// |v^T f_b|^2 for every beam b of the codebook, via the separable
// array-factor form: Q_V + Q_H evaluations plus one product per beam.
std::vector<double> normalized_gains(const SCSI& link, const BeamCodebook& cb) {
    const double cv = std::cos(link.angles.theta_tx);
    const double ch = std::sin(link.angles.theta_tx) * std::cos(link.angles.phi_tx);
    std::vector<double> av(cb.grid_v.size()), ah(cb.grid_h.size());
    for (std::size_t i = 0; i < av.size(); ++i) {
        av[i] = array_factor(cb.shape.vertical, 0.5 * (cv - cb.grid_v[i]));
    }
    for (std::size_t i = 0; i < ah.size(); ++i) {
        ah[i] = array_factor(cb.shape.horizontal, 0.5 * (ch - cb.grid_h[i]));
    }
    std::vector<double> g(static_cast<std::size_t>(cb.size()));
    for (int q = 0; q < cb.size(); ++q) {
        const double a = av[q / cb.shape.horizontal] * ah[q % cb.shape.horizontal];
        g[q] = a * a;
    }
    return g;
}

} // namespace

std::vector<BeamPlan> lcms_select(const System& sys, const Association& assoc, const BeamCodebook& codebook,
                                  const std::vector<int>& beams_per_sat) {
    const int S = sys.num_sats;
    const int Q = codebook.size();
    if (static_cast<int>(beams_per_sat.size()) != S) {
        throw Error("lcms_select: need one B_s per satellite");
    }
    if (assoc.num_sats() != S || assoc.num_uts() != sys.num_uts) {
        throw Error("lcms_select: association does not match the system");
    }
    std::vector<BeamPlan> plans(S);
    for (int s = 0; s < S; ++s) {
        const int bs = beams_per_sat[s];
        std::vector<int> uts = assoc.served(s);
        if (bs > Q) {
            throw Error("lcms_select: satellite " + std::to_string(s) + " asks for " + std::to_string(bs) +
                        " beams, codebook has " + std::to_string(Q));
        }
        if (bs < static_cast<int>(uts.size())) {
            throw Error("lcms_select: satellite " + std::to_string(s) + " serves " + std::to_string(uts.size()) +
                        " UTs but only " + std::to_string(bs) + " beams are allowed (need B_s >= K_s)");
        }
        std::stable_sort(uts.begin(), uts.end(),
                         [&](int a, int b) { return sys.link(s, a).gamma > sys.link(s, b).gamma; });

        std::vector<char> taken(Q, 0);
        std::vector<double> score(Q, 0.0);
        BeamPlan& plan = plans[s];
        plan.beams.reserve(bs);
        for (int k : uts) {
            const auto g = normalized_gains(sys.link(s, k), codebook);
            int best = -1;
            for (int q = 0; q < Q; ++q) {
                if (!taken[q] && (best < 0 || g[q] > g[best])) {
                    best = q;
                }
            }
            taken[best] = 1;
            plan.beams.push_back(best);
            const double gamma = sys.link(s, k).gamma;
            for (int q = 0; q < Q; ++q) {
                score[q] += gamma * g[q];
            }
        }
        // Stage-2 scores do not depend on earlier stage-2 picks, so the
        // greedy loop reduces to taking the best remaining scores in order.
        std::vector<int> rest;
        rest.reserve(Q);
        for (int q = 0; q < Q; ++q) {
            if (!taken[q]) {
                rest.push_back(q);
            }
        }
        const int need = bs - plan.size();
        std::partial_sort(rest.begin(), rest.begin() + need, rest.end(), [&](int a, int b) {
            return score[a] > score[b] || (score[a] == score[b] && a < b);
        });
        plan.beams.insert(plan.beams.end(), rest.begin(), rest.begin() + need);
        validate_plan(plan, Q);
    }
    return plans;
}

std::vector<BeamPlan> lcms_select(const System& sys, const Association& assoc, const BeamCodebook& codebook,
                                  int beams_per_sat) {
    return lcms_select(sys, assoc, codebook, std::vector<int>(sys.num_sats, beams_per_sat));
}

BeamPlan full_select(const BeamCodebook& codebook) {
    BeamPlan p;
    p.beams.resize(codebook.size());
    std::iota(p.beams.begin(), p.beams.end(), 0);
    return p;
}

} // namespace msms
