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

#include "msms/beamspace.hpp"

#include <cmath>
#include <numeric>

namespace msms {

namespace {

std::vector<double> dft_grid(int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) {
        g[i] = -1.0 + 2.0 * i / static_cast<double>(n);
    }
    return g;
}

// v_N(x)^T conj(v_N(w)) for every grid point w.
CVec inner_with_grid(int n, double x, const std::vector<double>& grid) {
    const CVec v = steering_1d(n, x);
    CVec out(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
        out(static_cast<Eigen::Index>(i)) = v.cwiseProduct(steering_1d(n, grid[i]).conjugate()).sum();
    }
    return out;
}

} // namespace

BeamCodebook dft_codebook(ArrayShape shape) {
    if (shape.vertical < 1 || shape.horizontal < 1) {
        throw Error("dft_codebook: array dimensions must be >= 1");
    }
    BeamCodebook cb;
    cb.shape = shape;
    cb.grid_v = dft_grid(shape.vertical);
    cb.grid_h = dft_grid(shape.horizontal);
    const int nt = shape.size();
    cb.f.resize(nt, nt);
    for (int nv = 0; nv < shape.vertical; ++nv) {
        const CVec a = steering_1d(shape.vertical, cb.grid_v[nv]);
        for (int nh = 0; nh < shape.horizontal; ++nh) {
            const CVec b = steering_1d(shape.horizontal, cb.grid_h[nh]);
            const int q = nv * shape.horizontal + nh;
            for (int i = 0; i < shape.vertical; ++i) {
                cb.f.col(q).segment(i * shape.horizontal, shape.horizontal) = std::conj(a(i)) * b.conjugate();
            }
        }
    }
    return cb;
}

void validate_plan(const BeamPlan& plan, int codebook_size) {
    std::vector<char> seen(static_cast<std::size_t>(codebook_size), 0);
    for (int b : plan.beams) {
        if (b < 0 || b >= codebook_size) {
            throw Error("beam index " + std::to_string(b) + " outside codebook of size " +
                        std::to_string(codebook_size));
        }
        if (seen[b]) {
            throw Error("beam index " + std::to_string(b) + " selected twice");
        }
        seen[b] = 1;
    }
}

CMat effective_channel(const CMat& h, const BeamCodebook& codebook, const BeamPlan& plan) {
    if (h.cols() != codebook.f.rows()) {
        throw Error("effective_channel: channel has " + std::to_string(h.cols()) +
                    " columns, codebook expects " + std::to_string(codebook.f.rows()));
    }
    validate_plan(plan, codebook.size());
    CMat out(h.rows(), plan.size());
    for (int b = 0; b < plan.size(); ++b) {
        out.col(b) = h * codebook.f.col(plan.beams[b]);
    }
    return out;
}

double sinc(double x) {
    if (std::abs(x) < 1e-8) {
        const double px = kPi * x;
        return 1.0 - px * px / 6.0;
    }
    return std::sin(kPi * x) / (kPi * x);
}

double array_factor(int n, double t) {
    // |sin(N pi t) / (N sin(pi t))| has period 1 in t; fold into [-1/2, 1/2]
    // where sinc(t) >= 2/pi and the ratio is well defined.
    const double r = t - std::round(t);
    return std::abs(sinc(n * r) / sinc(r));
}

double beam_gain(double gamma, double theta_tx, double phi_tx, double grid_v, double grid_h,
                 ArrayShape shape) {
    const double tv = 0.5 * (std::cos(theta_tx) - grid_v);
    const double th = 0.5 * (std::sin(theta_tx) * std::cos(phi_tx) - grid_h);
    const double g = array_factor(shape.vertical, tv) * array_factor(shape.horizontal, th);
    return gamma * g * g;
}

double beam_gain(const SCSI& link, const BeamCodebook& codebook, int beam) {
    return beam_gain(link.gamma, link.angles.theta_tx, link.angles.phi_tx, codebook.grid_v_of(beam),
                     codebook.grid_h_of(beam), codebook.shape);
}

BeamDomain::BeamDomain(int num_sats, int num_uts, std::vector<BeamPlan> plans, std::vector<CVec> vbar)
    : num_sats_(num_sats), num_uts_(num_uts), plans_(std::move(plans)), vbar_(std::move(vbar)) {
    if (static_cast<int>(plans_.size()) != num_sats_ ||
        static_cast<int>(vbar_.size()) != num_sats_ * num_uts_) {
        throw Error("BeamDomain: plan/steering table sizes do not match S and K");
    }
    for (int s = 0; s < num_sats_; ++s) {
        for (int k = 0; k < num_uts_; ++k) {
            if (vbar_[s * num_uts_ + k].size() != plans_[s].size()) {
                throw Error("BeamDomain: v_bar length differs from B_s");
            }
        }
    }
}

int BeamDomain::total_beams() const {
    return std::accumulate(plans_.begin(), plans_.end(), 0,
                           [](int acc, const BeamPlan& p) { return acc + p.size(); });
}

BeamDomain make_beam_domain(const std::vector<SCSI>& links, int num_sats, int num_uts,
                            const BeamCodebook& codebook, std::vector<BeamPlan> plans) {
    if (static_cast<int>(links.size()) != num_sats * num_uts) {
        throw Error("make_beam_domain: link table must have S*K entries");
    }
    if (static_cast<int>(plans.size()) != num_sats) {
        throw Error("make_beam_domain: need one plan per satellite");
    }
    for (const auto& p : plans) {
        validate_plan(p, codebook.size());
    }
    const ArrayShape shape = codebook.shape;
    std::vector<CVec> vbar(links.size());
    for (int s = 0; s < num_sats; ++s) {
        for (int k = 0; k < num_uts; ++k) {
            const SCSI& l = links[s * num_uts + k];
            if (!(l.tx == shape)) {
                throw Error("make_beam_domain: link transmit array differs from codebook");
            }
            // F is a Kronecker product, so v^T f_q factors into two 1-D sums.
            const CVec iv = inner_with_grid(shape.vertical, std::cos(l.angles.theta_tx), codebook.grid_v);
            const CVec ih = inner_with_grid(shape.horizontal,
                                            std::sin(l.angles.theta_tx) * std::cos(l.angles.phi_tx),
                                            codebook.grid_h);
            CVec& out = vbar[s * num_uts + k];
            out.resize(plans[s].size());
            for (int b = 0; b < plans[s].size(); ++b) {
                const int q = plans[s].beams[b];
                out(b) = iv(q / shape.horizontal) * ih(q % shape.horizontal);
            }
        }
    }
    return BeamDomain(num_sats, num_uts, std::move(plans), std::move(vbar));
}

} // namespace msms
