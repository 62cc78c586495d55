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

#ifndef MSMS_TESTS_SUPPORT_HPP
#define MSMS_TESTS_SUPPORT_HPP

#include "msms/beam_select.hpp"
#include "msms/beamspace.hpp"
#include "msms/clustering.hpp"
#include "msms/eval.hpp"
#include "msms/precoding.hpp"
#include "msms/linalg.hpp"
#include "msms/rng.hpp"
#include "msms/system.hpp"

#include <algorithm>
#include <memory>
#include <numeric>
#include <random>

namespace msms::test {

struct InstanceSpec {
    int sats = 3;
    int uts = 4;
    int serving = 2;
    ArrayShape tx{4, 4};
    ArrayShape rx{2, 2};
    int streams = 2;
    int beams = 8;
    bool full_beams = false;
    bool random_sigma = true;
    double noise = 0.05;
    double sat_power = 1.0;
};

// A synthetic system with random sCSI, random association and random beam
// plans. Heap-held so the context's references stay valid.
struct Instance {
    System sys;
    Association assoc;
    BeamCodebook codebook;
    BeamDomain beams;
    std::unique_ptr<PrecodingContext> ctx;
};

inline CMat random_unit_trace_psd(int n, Rng& rng) {
    CMat a(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            a(i, j) = complex_normal(rng);
        }
    }
    CMat s = a * a.adjoint() + 0.1 * CMat::Identity(n, n);
    return s / s.trace().real();
}

inline std::unique_ptr<Instance> random_instance(const InstanceSpec& spec, std::uint64_t seed) {
    Rng rng(seed * 7919 + 17);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto inst = std::make_unique<Instance>();
    System& sys = inst->sys;
    sys.num_sats = spec.sats;
    sys.num_uts = spec.uts;
    sys.tx = spec.tx;
    sys.rx = spec.rx;
    for (int s = 0; s < spec.sats; ++s) {
        for (int k = 0; k < spec.uts; ++k) {
            LinkAngles a;
            a.theta_tx = 0.3 + 2.5 * u01(rng);
            a.phi_tx = 2.0 * kPi * u01(rng);
            a.theta_rx = 0.2 + 1.2 * u01(rng);
            a.phi_rx = 2.0 * kPi * u01(rng);
            const double gamma = 0.5 + 1.5 * u01(rng);
            const double kappa = std::pow(10.0, 0.5 + 1.0 * u01(rng));
            const double zeta2 = 0.1 + 0.9 * u01(rng);
            SCSI l = make_scsi(gamma, kappa, a, spec.tx, spec.rx, zeta2);
            if (spec.random_sigma) {
                l.nlos_cov = random_unit_trace_psd(spec.rx.size(), rng);
                l.update_cache();
            }
            sys.links.push_back(std::move(l));
        }
    }
    sys.noise.assign(spec.uts, spec.noise);
    sys.weights.resize(spec.uts);
    for (auto& w : sys.weights) {
        w = 0.5 + u01(rng);
    }
    sys.streams.assign(spec.uts, spec.streams);
    sys.sat_power.assign(spec.sats, spec.sat_power);
    sys.validate();

    inst->assoc = Association(spec.sats, spec.uts);
    std::vector<int> order(spec.sats);
    for (int k = 0; k < spec.uts; ++k) {
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        for (int i = 0; i < spec.serving; ++i) {
            inst->assoc.set(order[i], k, true);
        }
    }

    inst->codebook = dft_codebook(spec.tx);
    std::vector<BeamPlan> plans(spec.sats);
    std::vector<int> all(inst->codebook.size());
    for (int s = 0; s < spec.sats; ++s) {
        std::iota(all.begin(), all.end(), 0);
        if (spec.full_beams) {
            plans[s].beams = all;
        } else {
            std::shuffle(all.begin(), all.end(), rng);
            plans[s].beams.assign(all.begin(), all.begin() + spec.beams);
        }
    }
    inst->beams = make_beam_domain(sys.links, spec.sats, spec.uts, inst->codebook, std::move(plans));
    inst->ctx = std::make_unique<PrecodingContext>(inst->sys, inst->assoc, inst->beams);
    return inst;
}

// Random precoders on the serving blocks, zero elsewhere.
inline PrecoderSet random_precoders(const PrecodingContext& ctx, Rng& rng) {
    PrecoderSet p = ctx.zero_precoders();
    for (int s = 0; s < ctx.num_sats(); ++s) {
        for (int k = 0; k < ctx.num_uts(); ++k) {
            if (!ctx.assoc().serves(s, k)) {
                continue;
            }
            CMat& w = p.at(s, k);
            for (Eigen::Index i = 0; i < w.rows(); ++i) {
                for (Eigen::Index j = 0; j < w.cols(); ++j) {
                    w(i, j) = 0.3 * complex_normal(rng);
                }
            }
        }
    }
    return p;
}

inline CMat random_cmat(Eigen::Index r, Eigen::Index c, Rng& rng) {
    CMat a(r, c);
    for (Eigen::Index i = 0; i < r; ++i) {
        for (Eigen::Index j = 0; j < c; ++j) {
            a(i, j) = complex_normal(rng);
        }
    }
    return a;
}

inline CMat random_hpd(Eigen::Index n, Rng& rng) {
    const CMat a = random_cmat(n, n, rng);
    return a * a.adjoint() / static_cast<double>(n) + 0.5 * CMat::Identity(n, n);
}

} // namespace msms::test

#endif
