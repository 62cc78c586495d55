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

#include "msms/eval.hpp"

#include "msms/rng.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace msms {

namespace {

struct TrialDraw {
    std::vector<CVec> rx;     // u_bar [s * K + k]
    std::vector<cx> phase;    // phi [s * K + k]
    std::vector<cx> leak_phase; // [(s * K + j) * K + k], only with cross terms
};

TrialDraw draw_trial(const System& sys, int trial, const EvalOptions& opt) {
    const int S = sys.num_sats;
    const int K = sys.num_uts;
    Rng rng = substream(opt.seed, Stream::Evaluation, static_cast<std::uint64_t>(trial));
    TrialDraw d;
    d.rx.resize(static_cast<std::size_t>(S) * K);
    d.phase.resize(d.rx.size());
    for (int s = 0; s < S; ++s) {
        for (int k = 0; k < K; ++k) {
            const SCSI& l = sys.link(s, k);
            d.rx[s * K + k] = sample_rx_vector(l, rng);
            d.phase[s * K + k] = sample_phase(l.phase_var, rng);
        }
    }
    if (opt.keep_cross_terms) {
        d.leak_phase.resize(static_cast<std::size_t>(S) * K * K);
        for (int s = 0; s < S; ++s) {
            for (int j = 0; j < K; ++j) {
                for (int k = 0; k < K; ++k) {
                    d.leak_phase[(s * K + j) * K + k] = sample_phase(sys.link(s, k).phase_var, rng);
                }
            }
        }
    }
    return d;
}

// Rates from the per-link received responses resp(s, j, k) = H_bar_{s,k} W_{s,j}
// (N_R x M_j), so the beam and antenna paths share the reduction.
template <typename Response>
std::vector<double> rates_from_responses(const PrecodingContext& ctx, const TrialDraw& d, const EvalOptions& opt,
                                         Response&& resp) {
    const int S = ctx.num_sats();
    const int K = ctx.num_uts();
    const int nr = ctx.nr();
    const auto& a = ctx.assoc();
    std::vector<double> rates(K);
    for (int k = 0; k < K; ++k) {
        CMat g = CMat::Zero(nr, ctx.sys().streams[k]);
        for (int s = 0; s < S; ++s) {
            if (a.serves(s, k)) {
                g += d.phase[s * K + k] * resp(s, k, k);
            }
        }
        CMat r = ctx.sys().noise[k] * CMat::Identity(nr, nr);
        for (int j = 0; j < K; ++j) {
            if (j == k) {
                continue;
            }
            if (opt.keep_cross_terms) {
                CMat y = CMat::Zero(nr, ctx.sys().streams[j]);
                for (int s = 0; s < S; ++s) {
                    if (a.serves(s, j)) {
                        y += d.leak_phase[(s * K + j) * K + k] * resp(s, j, k);
                    }
                }
                r += y * y.adjoint();
            } else {
                for (int s = 0; s < S; ++s) {
                    if (a.serves(s, j)) {
                        const CMat y = resp(s, j, k);
                        r += y * y.adjoint();
                    }
                }
            }
        }
        rates[k] = log2det_rate(g, r);
    }
    return rates;
}

} // namespace

double log2det_rate(const CMat& g, const CMat& r_other) {
    Eigen::LLT<CMat> llt(r_other);
    if (llt.info() != Eigen::Success) {
        throw Error("log2det_rate: interference-plus-noise covariance is not positive definite");
    }
    const CMat y = llt.matrixL().solve(g);
    const CMat m = CMat::Identity(g.cols(), g.cols()) + y.adjoint() * y;
    Eigen::LLT<CMat> lm(m);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        acc += 2.0 * std::log(lm.matrixL()(i, i).real());
    }
    const double r = acc / std::numbers::ln2;
    if (!std::isfinite(r)) {
        throw Error("log2det_rate: non-finite rate");
    }
    return r;
}

std::vector<double> trial_rates(const PrecodingContext& ctx, const PrecoderSet& p, int trial,
                                const EvalOptions& opt) {
    const TrialDraw d = draw_trial(ctx.sys(), trial, opt);
    const int K = ctx.num_uts();
    return rates_from_responses(ctx, d, opt, [&](int s, int j, int k) -> CMat {
        // u_bar (v_bar^T W)
        return d.rx[s * K + k] * (ctx.beams().vbar(s, k).transpose() * p.at(s, j));
    });
}

std::vector<double> trial_rates_antenna(const PrecodingContext& ctx, const BeamCodebook& codebook,
                                        const PrecoderSet& p, int trial, const EvalOptions& opt) {
    const TrialDraw d = draw_trial(ctx.sys(), trial, opt);
    const int S = ctx.num_sats();
    const int K = ctx.num_uts();
    std::vector<CMat> x(static_cast<std::size_t>(S) * K);
    for (int s = 0; s < S; ++s) {
        const BeamPlan& plan = ctx.beams().plan(s);
        CMat fa(codebook.f.rows(), plan.size());
        for (int b = 0; b < plan.size(); ++b) {
            fa.col(b) = codebook.f.col(plan.beams[b]);
        }
        for (int j = 0; j < K; ++j) {
            x[s * K + j] = fa * p.at(s, j);
        }
    }
    std::vector<CMat> h(static_cast<std::size_t>(S) * K);
    for (int s = 0; s < S; ++s) {
        for (int k = 0; k < K; ++k) {
            h[s * K + k] = d.rx[s * K + k] * ctx.sys().link(s, k).tx_steering().transpose();
        }
    }
    return rates_from_responses(ctx, d, opt,
                                [&](int s, int j, int k) -> CMat { return h[s * K + k] * x[s * K + j]; });
}

RateReport mc_sum_rate(const PrecodingContext& ctx, const PrecoderSet& p, const EvalOptions& opt) {
    if (opt.trials < 1) {
        throw Error("mc_sum_rate: trials must be >= 1");
    }
    const int K = ctx.num_uts();
    const auto& beta = ctx.sys().weights;
    std::vector<std::vector<double>> per(opt.trials);
    for (int t = 0; t < opt.trials; ++t) {
        per[t] = trial_rates(ctx, p, t, opt);
    }
    RateReport rep = ubound_sum_rate(ctx, p);
    rep.trials = opt.trials;
    rep.mc.assign(K, 0.0);
    rep.mc_stderr.assign(K, 0.0);
    const double n = opt.trials;
    std::vector<double> sums(opt.trials, 0.0);
    for (int t = 0; t < opt.trials; ++t) {
        for (int k = 0; k < K; ++k) {
            rep.mc[k] += per[t][k];
            sums[t] += beta[k] * per[t][k];
        }
    }
    for (int k = 0; k < K; ++k) {
        rep.mc[k] /= n;
    }
    double sum_mean = 0.0;
    for (double v : sums) {
        sum_mean += v;
    }
    sum_mean /= n;
    if (opt.trials > 1) {
        for (int k = 0; k < K; ++k) {
            double var = 0.0;
            for (int t = 0; t < opt.trials; ++t) {
                const double e = per[t][k] - rep.mc[k];
                var += e * e;
            }
            rep.mc_stderr[k] = std::sqrt(var / (n - 1.0) / n);
        }
        double var = 0.0;
        for (double v : sums) {
            var += (v - sum_mean) * (v - sum_mean);
        }
        rep.sum_stderr = std::sqrt(var / (n - 1.0) / n);
    }
    rep.sum_mc = sum_mean;
    return rep;
}

RateReport ubound_sum_rate(const PrecodingContext& ctx, const PrecoderSet& p) {
    RateReport rep;
    rep.ubound = upper_bound_rates(ctx, p);
    for (int k = 0; k < ctx.num_uts(); ++k) {
        rep.sum_ubound += ctx.sys().weights[k] * rep.ubound[k];
    }
    return rep;
}

} // namespace msms
