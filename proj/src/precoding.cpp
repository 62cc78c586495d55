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

#include "msms/precoding.hpp"

#include "msms/linalg.hpp"
#include "msms/rng.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace msms {

double PrecoderSet::sat_power(int s) const {
    double p = 0.0;
    for (int k = 0; k < num_uts; ++k) {
        p += at(s, k).squaredNorm();
    }
    return p;
}

bool PrecoderSet::all_finite() const {
    for (const auto& m : w) {
        if (!m.allFinite()) {
            return false;
        }
    }
    return true;
}

CMat compute_delta(const SCSI& a, const SCSI& b, bool same_satellite) {
    if (same_satellite) {
        CMat d = a.los_weight() * a.rx_steering * a.rx_steering.adjoint();
        const double w = a.nlos_weight();
        if (w > 0.0) {
            d += w * a.nlos_cov;
        }
        return linalg::hermitian_part(d);
    }
    const cx scale = std::sqrt(a.los_weight() * b.los_weight()) * a.mean_phase * std::conj(b.mean_phase);
    return scale * a.rx_steering * b.rx_steering.adjoint();
}

TildeSigma tilde_sigma(const SCSI& link) {
    const double coh = std::norm(link.mean_phase);
    if (coh > 1.0 + 1e-12) {
        throw Error("tilde_sigma: |mean phase| exceeds 1");
    }
    CMat a = std::max(0.0, 1.0 - coh) * link.los_weight() * link.rx_steering * link.rx_steering.adjoint();
    const double w = link.nlos_weight();
    if (w > 0.0) {
        a += w * link.nlos_cov;
    }
    const auto f = linalg::psd_factor(linalg::hermitian_part(a));
    if (f.clipped) {
        spdlog::warn("tilde_sigma: incoherent covariance indefinite (min eigenvalue {:.3e}), clipped",
                     f.min_eigenvalue);
    }
    return {f.factor, f.clipped};
}

PrecodingContext::PrecodingContext(const System& sys, const Association& assoc, const BeamDomain& beams)
    : sys_(&sys), assoc_(&assoc), beams_(&beams) {
    const int S = sys.num_sats;
    const int K = sys.num_uts;
    if (assoc.num_sats() != S || assoc.num_uts() != K) {
        throw Error("PrecodingContext: association does not match the system");
    }
    if (beams.num_sats() != S || beams.num_uts() != K) {
        throw Error("PrecodingContext: beam domain does not match the system");
    }
    delta_.resize(static_cast<std::size_t>(S) * S * K);
    for (int k = 0; k < K; ++k) {
        for (int s1 = 0; s1 < S; ++s1) {
            for (int s2 = 0; s2 < S; ++s2) {
                delta_[(k * S + s1) * S + s2] = compute_delta(sys.link(s1, k), sys.link(s2, k), s1 == s2);
            }
        }
    }
    tilde_sigma_.resize(static_cast<std::size_t>(S) * K);
    for (int s = 0; s < S; ++s) {
        for (int k = 0; k < K; ++k) {
            tilde_sigma_[s * K + k] = msms::tilde_sigma(sys.link(s, k)).factor;
        }
    }
}

PrecoderSet PrecodingContext::zero_precoders() const {
    PrecoderSet p;
    p.num_sats = num_sats();
    p.num_uts = num_uts();
    p.w.resize(static_cast<std::size_t>(num_sats()) * num_uts());
    for (int s = 0; s < num_sats(); ++s) {
        for (int k = 0; k < num_uts(); ++k) {
            p.at(s, k) = CMat::Zero(beams_->beams(s), sys_->streams[k]);
        }
    }
    p.ut_budget.assign(num_uts(), sys_->per_ut_budget());
    return p;
}

CVec q_vector(const PrecodingContext& ctx, const PrecoderSet& p, int s, int j, int k) {
    if (!ctx.assoc().serves(s, j)) {
        return CVec::Zero(ctx.sys().streams[j]);
    }
    return p.at(s, j).adjoint() * ctx.beams().vbar(s, k).conjugate();
}

CMat sqrt_sig(const PrecodingContext& ctx, const PrecoderSet& p, int k) {
    const int S = ctx.num_sats();
    const int nr = ctx.nr();
    const int m = ctx.sys().streams[k];
    CMat r = CMat::Zero(nr, ctx.aux_dim(k));
    for (int s = 0; s < S; ++s) {
        if (!ctx.assoc().serves(s, k)) {
            continue;
        }
        const SCSI& link = ctx.sys().link(s, k);
        const CVec q = q_vector(ctx, p, s, k, k);
        r.leftCols(m) += (link.mean_phase * std::sqrt(link.los_weight())) * link.rx_steering * q.adjoint();
        const CMat& ts = ctx.tilde_sigma(s, k);
        for (int n = 0; n < nr; ++n) {
            r.middleCols(m + (s * nr + n) * m, m) = ts.col(n) * q.adjoint();
        }
    }
    return r;
}

CovPair assemble_cov(const PrecodingContext& ctx, const PrecoderSet& p, int k) {
    const int S = ctx.num_sats();
    const int K = ctx.num_uts();
    const int nr = ctx.nr();
    std::vector<CVec> q(S);
    for (int s = 0; s < S; ++s) {
        q[s] = q_vector(ctx, p, s, k, k);
    }
    CovPair cov;
    cov.sig = CMat::Zero(nr, nr);
    for (int s1 = 0; s1 < S; ++s1) {
        if (!ctx.assoc().serves(s1, k)) {
            continue;
        }
        for (int s2 = 0; s2 < S; ++s2) {
            if (ctx.assoc().serves(s2, k)) {
                cov.sig += q[s1].dot(q[s2]) * ctx.delta(s1, s2, k);
            }
        }
    }
    cov.sig = linalg::hermitian_part(cov.sig);
    cov.other = ctx.sys().noise[k] * CMat::Identity(nr, nr);
    for (int s = 0; s < S; ++s) {
        double leak = 0.0;
        for (int j = 0; j < K; ++j) {
            if (j != k) {
                leak += q_vector(ctx, p, s, j, k).squaredNorm();
            }
        }
        if (leak > 0.0) {
            cov.other += leak * ctx.delta(s, s, k);
        }
    }
    cov.other = linalg::hermitian_part(cov.other);
    cov.sig_sqrt = sqrt_sig(ctx, p, k);
    return cov;
}

CMat update_D(const CovPair& cov) { return linalg::solve_hpd(cov.sig + cov.other, cov.sig_sqrt); }

CUpdate update_C(const CovPair& cov, const CMat& d) {
    const Eigen::Index l = cov.sig_sqrt.cols();
    const CMat dr = d.adjoint() * cov.sig_sqrt;
    CMat e = d.adjoint() * (cov.sig + cov.other) * d - dr - dr.adjoint() + CMat::Identity(l, l);
    CUpdate out;
    out.e = linalg::hermitian_part(e);
    out.c = linalg::hermitian_part(linalg::inverse_hpd(out.e));
    return out;
}

double rate_from_cov(const CovPair& cov) {
    const double r = (linalg::logdet_hpd(cov.sig + cov.other) - linalg::logdet_hpd(cov.other)) / std::numbers::ln2;
    return std::max(r, 0.0);
}

std::vector<double> upper_bound_rates(const PrecodingContext& ctx, const PrecoderSet& p) {
    std::vector<double> r(ctx.num_uts());
    for (int k = 0; k < ctx.num_uts(); ++k) {
        r[k] = rate_from_cov(assemble_cov(ctx, p, k));
    }
    return r;
}

CMat psi_matrix(const PrecodingContext& ctx, int k, const CMat& c, const CMat& d) {
    const int S = ctx.num_sats();
    const CMat x = d * c * d.adjoint();
    const CMat xt = x.transpose();
    CMat psi(S, S);
    for (int a = 0; a < S; ++a) {
        for (int b = 0; b < S; ++b) {
            psi(a, b) = xt.cwiseProduct(ctx.delta(b, a, k)).sum();
        }
    }
    return psi;
}

CMat t_matrix(const PrecodingContext& ctx, int k, const CMat& c, const CMat& d) {
    const int S = ctx.num_sats();
    const int nr = ctx.nr();
    const int m = ctx.sys().streams[k];
    const CMat dc = d * c;
    CMat t = CMat::Zero(S, m);
    for (int s = 0; s < S; ++s) {
        const SCSI& link = ctx.sys().link(s, k);
        const cx coef = std::conj(link.mean_phase) * std::sqrt(link.los_weight());
        t.row(s) = coef * (link.rx_steering.adjoint() * dc.leftCols(m));
        const CMat& ts = ctx.tilde_sigma(s, k);
        for (int n = 0; n < nr; ++n) {
            t.row(s) += ts.col(n).adjoint() * dc.middleCols(m + (s * nr + n) * m, m);
        }
    }
    return t;
}

namespace {

struct Layout {
    std::vector<int> sats;
    std::vector<int> offsets;
    int dim = 0;
};

Layout serving_layout(const PrecodingContext& ctx, int k) {
    Layout l;
    l.sats = ctx.assoc().serving(k);
    for (int s : l.sats) {
        l.offsets.push_back(l.dim);
        l.dim += ctx.beams().beams(s);
    }
    return l;
}

// beta_k Vb^H Own Vb + sum_{j != k} beta_j Vt_{j,k}^H diag(leak_j) Vt_{j,k}
// restricted to the serving satellites of k. own(a, b) multiplies the block
// conj(v_bar_{a,k}) v_bar_{b,k}^T; leak[j](s) multiplies conj(v_bar_{s,j}) v_bar_{s,j}^T.
CMat assemble_xi(const PrecodingContext& ctx, int k, const Layout& lay, const CMat& own,
                 const std::vector<RVec>& leak) {
    const int K = ctx.num_uts();
    const auto& w = ctx.sys().weights;
    CMat xi = CMat::Zero(lay.dim, lay.dim);
    for (std::size_t a = 0; a < lay.sats.size(); ++a) {
        const int sa = lay.sats[a];
        const CVec va = ctx.beams().vbar(sa, k).conjugate();
        for (std::size_t b = 0; b < lay.sats.size(); ++b) {
            const int sb = lay.sats[b];
            xi.block(lay.offsets[a], lay.offsets[b], va.size(), ctx.beams().beams(sb)) =
                (w[k] * own(sa, sb)) * va * ctx.beams().vbar(sb, k).transpose();
        }
        if (K > 1) {
            CMat v(va.size(), K - 1);
            RVec scale(K - 1);
            for (int j = 0, c = 0; j < K; ++j) {
                if (j == k) {
                    continue;
                }
                v.col(c) = ctx.beams().vbar(sa, j).conjugate();
                scale(c) = w[j] * leak[j](sa);
                ++c;
            }
            xi.block(lay.offsets[a], lay.offsets[a], va.size(), va.size()) +=
                (v * scale.asDiagonal()) * v.adjoint();
        }
    }
    return linalg::hermitian_part(xi);
}

CMat stacked_rhs(const PrecodingContext& ctx, int k, const Layout& lay, const CMat& t) {
    CMat r = CMat::Zero(lay.dim, t.cols());
    for (std::size_t a = 0; a < lay.sats.size(); ++a) {
        const int s = lay.sats[a];
        r.middleRows(lay.offsets[a], ctx.beams().beams(s)) = ctx.beams().vbar(s, k).conjugate() * t.row(s);
    }
    return r;
}

} // namespace

GradientPack gradient_pack(const PrecodingContext& ctx, int k, const std::vector<CMat>& psi_all, const CMat& c_k,
                           const CMat& d_k) {
    const int K = ctx.num_uts();
    if (static_cast<int>(psi_all.size()) != K) {
        throw Error("gradient_pack: need Psi_j for every UT");
    }
    const Layout lay = serving_layout(ctx, k);
    GradientPack pack;
    pack.ut = k;
    pack.sats = lay.sats;
    pack.offsets = lay.offsets;
    pack.dim = lay.dim;
    pack.psi = psi_all[k];
    pack.t = t_matrix(ctx, k, c_k, d_k);
    std::vector<RVec> leak(K);
    for (int j = 0; j < K; ++j) {
        leak[j] = psi_all[j].diagonal().real();
    }
    pack.xi = assemble_xi(ctx, k, lay, pack.psi, leak);
    pack.vht = stacked_rhs(ctx, k, lay, pack.t);
    pack.beta = ctx.sys().weights[k];
    const double tr = (d_k * c_k * d_k.adjoint()).trace().real();
    pack.beta_tilde = pack.beta * ctx.sys().noise[k] / ctx.sys().per_ut_budget() * tr;
    return pack;
}

CMat stack_precoder(const PrecodingContext& ctx, const PrecoderSet& p, const GradientPack& pack) {
    CMat w = CMat::Zero(pack.dim, ctx.sys().streams[pack.ut]);
    for (std::size_t a = 0; a < pack.sats.size(); ++a) {
        const int s = pack.sats[a];
        w.middleRows(pack.offsets[a], ctx.beams().beams(s)) = p.at(s, pack.ut);
    }
    return w;
}

void scatter_precoder(const PrecodingContext& ctx, PrecoderSet& p, const GradientPack& pack, const CMat& wk) {
    for (int s = 0; s < ctx.num_sats(); ++s) {
        p.at(s, pack.ut).setZero();
    }
    for (std::size_t a = 0; a < pack.sats.size(); ++a) {
        const int s = pack.sats[a];
        p.at(s, pack.ut) = wk.middleRows(pack.offsets[a], ctx.beams().beams(s));
    }
}

WSolution solve_W(const GradientPack& pack, double budget) {
    WSolution sol;
    const Eigen::Index m = pack.vht.cols();
    if (pack.dim == 0 || pack.vht.norm() == 0.0) {
        sol.w = CMat::Zero(pack.dim, m);
        sol.w_bar = sol.w;
        sol.zero = true;
        spdlog::debug("solve_W: UT {} has zero V^H T, precoder switched off", pack.ut);
        return sol;
    }
    const CMat a = pack.xi + pack.beta_tilde * CMat::Identity(pack.dim, pack.dim);
    sol.w_bar = pack.beta * linalg::solve_hpd(a, pack.vht);
    const double nrm2 = sol.w_bar.squaredNorm();
    if (!(nrm2 > 0.0) || !std::isfinite(nrm2)) {
        sol.w = CMat::Zero(pack.dim, m);
        sol.zero = true;
        spdlog::warn("solve_W: UT {} produced a degenerate direction, precoder switched off", pack.ut);
        return sol;
    }
    sol.eta = std::sqrt(budget / nrm2);
    sol.w = sol.eta * sol.w_bar;
    return sol;
}

CMat lagrangian_gradient(const GradientPack& pack, const CMat& w, double eta) {
    return (pack.xi * w + pack.beta_tilde * w) / (eta * eta) - (pack.beta / eta) * pack.vht;
}

void satellite_rescale(PrecoderSet& p, const System& sys) {
    for (int s = 0; s < p.num_sats; ++s) {
        const double used = p.sat_power(s);
        if (used > sys.sat_power[s]) {
            const double f = std::sqrt(sys.sat_power[s] / used);
            for (int k = 0; k < p.num_uts; ++k) {
                p.at(s, k) *= f;
            }
        }
    }
}

namespace {

double weighted_sum(const std::vector<double>& r, const std::vector<double>& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        acc += w[i] * r[i];
    }
    return acc;
}

PrecoderSet random_init(const PrecodingContext& ctx, std::uint64_t seed) {
    PrecoderSet p = ctx.zero_precoders();
    const double budget = ctx.sys().per_ut_budget();
    for (int k = 0; k < ctx.num_uts(); ++k) {
        Rng rng = substream(seed, Stream::Init, static_cast<std::uint64_t>(k));
        double total = 0.0;
        for (int s : ctx.assoc().serving(k)) {
            CMat& w = p.at(s, k);
            for (Eigen::Index i = 0; i < w.size(); ++i) {
                w.data()[i] = complex_normal(rng);
            }
            total += w.squaredNorm();
        }
        if (total > 0.0) {
            for (int s : ctx.assoc().serving(k)) {
                p.at(s, k) *= std::sqrt(budget / total);
            }
        }
    }
    return p;
}

} // namespace

PrecoderSet cdwmmse(const PrecodingContext& ctx, const CdwmOptions& opt) {
    if (opt.max_iterations < 1) {
        throw Error("cdwmmse: max_iterations must be >= 1");
    }
    if (!(opt.chi > 0.0)) {
        throw Error("cdwmmse: chi must be positive");
    }
    const int K = ctx.num_uts();
    const auto& beta = ctx.sys().weights;
    const double budget = ctx.sys().per_ut_budget();

    PrecoderSet w = opt.init == CdwmInit::Cdm ? cdm_precoder(ctx, false) : random_init(ctx, opt.seed);
    std::vector<double> logdet_e(K);
    for (int k = 0; k < K; ++k) {
        logdet_e[k] = ctx.aux_dim(k) * std::log(opt.chi);
    }
    std::vector<CMat> cs(K), ds(K), psi(K);
    PrecoderSet best;
    double best_value = -std::numeric_limits<double>::infinity();
    std::vector<double> trace;
    bool converged = false;
    int n = 0;
    while (n < opt.max_iterations) {
        ++n;
        double change = 0.0;
        for (int k = 0; k < K; ++k) {
            const CovPair cov = assemble_cov(ctx, w, k);
            ds[k] = update_D(cov);
            const CUpdate cu = update_C(cov, ds[k]);
            cs[k] = cu.c;
            const double ld = linalg::logdet_hpd(cu.e);
            change += beta[k] * (logdet_e[k] - ld) / std::numbers::ln2;
            logdet_e[k] = ld;
        }
        for (int k = 0; k < K; ++k) {
            psi[k] = psi_matrix(ctx, k, cs[k], ds[k]);
        }
        PrecoderSet next = ctx.zero_precoders();
        for (int k = 0; k < K; ++k) {
            const GradientPack pack = gradient_pack(ctx, k, psi, cs[k], ds[k]);
            const WSolution sol = solve_W(pack, budget);
            scatter_precoder(ctx, next, pack, sol.w);
        }
        if (!next.all_finite()) {
            throw Error("cdwmmse: non-finite precoder at iteration " + std::to_string(n));
        }
        w = std::move(next);

        PrecoderSet scaled = w;
        satellite_rescale(scaled, ctx.sys());
        const double value = weighted_sum(upper_bound_rates(ctx, scaled), beta);
        if (!std::isfinite(value)) {
            throw Error("cdwmmse: non-finite objective at iteration " + std::to_string(n));
        }
        trace.push_back(value);
        if (value > best_value) {
            best_value = value;
            best = std::move(scaled);
        }
        if (change < opt.tolerance) {
            converged = true;
            break;
        }
    }
    best.iterations = n;
    best.converged = converged;
    best.trace = std::move(trace);
    best.c = std::move(cs);
    best.d = std::move(ds);
    return best;
}

PrecoderSet cdm_precoder(const PrecodingContext& ctx, bool apply_satellite_rescale) {
    const int S = ctx.num_sats();
    const int K = ctx.num_uts();
    const int nr = ctx.nr();
    const double budget = ctx.sys().per_ut_budget();
    PrecoderSet p = ctx.zero_precoders();

    std::vector<RVec> leak(K, RVec(S));
    for (int j = 0; j < K; ++j) {
        for (int s = 0; s < S; ++s) {
            leak[j](s) = ctx.delta(s, s, j).trace().real();
        }
    }
    for (int k = 0; k < K; ++k) {
        const Layout lay = serving_layout(ctx, k);
        CMat own(S, S);
        CMat t(S, nr);
        for (int a = 0; a < S; ++a) {
            for (int b = 0; b < S; ++b) {
                own(a, b) = ctx.delta(b, a, k).trace();
            }
            const SCSI& link = ctx.sys().link(a, k);
            t.row(a) = (std::conj(link.mean_phase) * std::sqrt(link.los_weight())) * link.rx_steering.adjoint();
        }
        const CMat xi = assemble_xi(ctx, k, lay, own, leak);
        const CMat rhs = stacked_rhs(ctx, k, lay, t);
        const int m = ctx.sys().streams[k];
        if (rhs.norm() == 0.0) {
            spdlog::debug("cdm_precoder: UT {} has no LoS component, precoder switched off", k);
            continue;
        }
        const double beta_breve = ctx.sys().weights[k] * ctx.sys().noise[k] * nr / budget;
        const CMat full = linalg::solve_hpd(xi + beta_breve * CMat::Identity(lay.dim, lay.dim), rhs);
        const CMat wk = full.leftCols(m);
        const double nrm2 = wk.squaredNorm();
        if (!(nrm2 > 0.0)) {
            continue;
        }
        GradientPack place;
        place.ut = k;
        place.sats = lay.sats;
        place.offsets = lay.offsets;
        place.dim = lay.dim;
        scatter_precoder(ctx, p, place, std::sqrt(budget / nrm2) * wk);
    }
    if (apply_satellite_rescale) {
        satellite_rescale(p, ctx.sys());
    }
    return p;
}

namespace {

void normalize_satellites_exact(PrecoderSet& p, const System& sys) {
    for (int s = 0; s < p.num_sats; ++s) {
        const double used = p.sat_power(s);
        if (used > 0.0) {
            const double f = std::sqrt(sys.sat_power[s] / used);
            for (int k = 0; k < p.num_uts; ++k) {
                p.at(s, k) *= f;
            }
        }
    }
}

} // namespace

PrecoderSet lib_precoder(const PrecodingContext& ctx) {
    PrecoderSet p = ctx.zero_precoders();
    for (int k = 0; k < ctx.num_uts(); ++k) {
        const int m = ctx.sys().streams[k];
        int b = 0;
        for (int s : ctx.assoc().serving(k)) {
            p.at(s, k).col(b) = ctx.beams().vbar(s, k).conjugate();
            b = (b + 1) % m;
        }
    }
    normalize_satellites_exact(p, ctx.sys());
    return p;
}

PrecoderSet dft_baseline(const PrecodingContext& ctx) {
    PrecoderSet p = ctx.zero_precoders();
    for (int k = 0; k < ctx.num_uts(); ++k) {
        const int m = ctx.sys().streams[k];
        int b = 0;
        for (int s : ctx.assoc().serving(k)) {
            const CVec& v = ctx.beams().vbar(s, k);
            Eigen::Index best = 0;
            for (Eigen::Index i = 1; i < v.size(); ++i) {
                if (std::norm(v(i)) > std::norm(v(best))) {
                    best = i;
                }
            }
            p.at(s, k)(best, b) = 1.0;
            b = (b + 1) % m;
        }
    }
    normalize_satellites_exact(p, ctx.sys());
    return p;
}

} // namespace msms
