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

#ifndef MSMS_EVAL_HPP
#define MSMS_EVAL_HPP

#include "msms/beamspace.hpp"
#include "msms/precoding.hpp"

#include <cstdint>
#include <vector>

namespace msms {

struct RateReport {
    std::vector<double> mc;         // per-UT ergodic rate, bits/s/Hz
    std::vector<double> mc_stderr;  // per-UT standard error of the mean
    std::vector<double> ubound;     // per-UT statistical upper bound
    double sum_mc = 0.0;            // weighted
    double sum_stderr = 0.0;        // standard error of the weighted per-trial sum
    double sum_ubound = 0.0;        // weighted
    int trials = 0;
};

struct EvalOptions {
    int trials = 500;
    std::uint64_t seed = 0;
    // Keep cross-satellite interference cross terms, each satellite's
    // contribution carrying an independent sampled phase error.
    bool keep_cross_terms = false;
};

// Per-UT instantaneous rates of one Monte-Carlo trial, computed in the beam
// domain from sampled u_bar and phase errors (substream: seed, trial).
std::vector<double> trial_rates(const PrecodingContext& ctx, const PrecoderSet& p, int trial,
                                const EvalOptions& opt);

// The same trial evaluated in the antenna domain: H_{s,k} = u_bar v^T and
// x = F A W, with identical random draws.
std::vector<double> trial_rates_antenna(const PrecodingContext& ctx, const BeamCodebook& codebook,
                                        const PrecoderSet& p, int trial, const EvalOptions& opt);

RateReport mc_sum_rate(const PrecodingContext& ctx, const PrecoderSet& p, const EvalOptions& opt);

// Deterministic; only the ubound fields are filled.
RateReport ubound_sum_rate(const PrecodingContext& ctx, const PrecoderSet& p);

// log2 det(I + G^H R^{-1} G) for Hermitian positive definite R.
double log2det_rate(const CMat& g, const CMat& r_other);

} // namespace msms

#endif
