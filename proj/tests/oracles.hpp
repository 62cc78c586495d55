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

#ifndef MSMS_TESTS_ORACLES_HPP
#define MSMS_TESTS_ORACLES_HPP

// Reference computations written directly from the model definitions,
// without calling the library code they are compared against.

#include "msms/precoding.hpp"
#include "msms/rng.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace msms::oracle {

// Element (iv, ih) at index iv * N_H + ih, phase -pi (iv cos(theta) + ih sin(theta) cos(phi)).
inline CVec upa(double theta, double phi, ArrayShape shape) {
    const double x = std::cos(theta);
    const double y = std::sin(theta) * std::cos(phi);
    CVec v(shape.size());
    for (int iv = 0; iv < shape.vertical; ++iv) {
        for (int ih = 0; ih < shape.horizontal; ++ih) {
            v(iv * shape.horizontal + ih) = std::polar(1.0, -kPi * (iv * x + ih * y));
        }
    }
    return v / std::sqrt(static_cast<double>(shape.size()));
}

// Column q = nv * N_H + nh of the conjugated 2-D DFT codebook.
inline CVec dft_column(int q, ArrayShape shape) {
    const int nv = q / shape.horizontal;
    const int nh = q % shape.horizontal;
    CVec f(shape.size());
    for (int iv = 0; iv < shape.vertical; ++iv) {
        for (int ih = 0; ih < shape.horizontal; ++ih) {
            const double wv = -1.0 + 2.0 * nv / shape.vertical;
            const double wh = -1.0 + 2.0 * nh / shape.horizontal;
            f(iv * shape.horizontal + ih) = std::polar(1.0, kPi * (iv * wv + ih * wh));
        }
    }
    return f / std::sqrt(static_cast<double>(shape.size()));
}

inline CVec vbar(const PrecodingContext& ctx, int s, int k) {
    const SCSI& l = ctx.sys().link(s, k);
    const CVec v = upa(l.angles.theta_tx, l.angles.phi_tx, l.tx);
    const BeamPlan& plan = ctx.beams().plan(s);
    CVec out(plan.size());
    for (int b = 0; b < plan.size(); ++b) {
        out(b) = v.transpose() * dft_column(plan.beams[b], l.tx);
    }
    return out;
}

struct LinkMoments {
    double rho = 0.0;
    double rho_t = 0.0;
    cx phibar;
    CVec u;
    CMat sigma;
};

inline LinkMoments moments(const SCSI& l) {
    LinkMoments m;
    m.rho = l.kappa * l.gamma / (l.kappa + 1.0);
    m.rho_t = l.gamma / (l.kappa + 1.0);
    m.phibar = std::exp(-0.5 * l.phase_var);
    m.u = upa(l.angles.theta_rx, l.angles.phi_rx, l.rx);
    m.sigma = l.nlos_cov;
    return m;
}

// E{G G^H}, G = sum_s phi_s u_bar_s (v_bar_s^T W_{s,k}) over serving satellites.
inline CMat r_sig(const PrecodingContext& ctx, const PrecoderSet& p, int k) {
    const int S = ctx.num_sats();
    const int nr = ctx.nr();
    CMat r = CMat::Zero(nr, nr);
    for (int a = 0; a < S; ++a) {
        if (!ctx.assoc().serves(a, k)) {
            continue;
        }
        const LinkMoments ma = moments(ctx.sys().link(a, k));
        const CMat ga = vbar(ctx, a, k).transpose() * p.at(a, k);
        for (int b = 0; b < S; ++b) {
            if (!ctx.assoc().serves(b, k)) {
                continue;
            }
            const LinkMoments mb = moments(ctx.sys().link(b, k));
            const CMat gb = vbar(ctx, b, k).transpose() * p.at(b, k);
            const cx g = (ga * gb.adjoint())(0, 0);
            if (a == b) {
                r += g * (ma.rho * ma.u * ma.u.adjoint() + ma.rho_t * ma.sigma);
            } else {
                r += g * ma.phibar * std::conj(mb.phibar) * std::sqrt(ma.rho * mb.rho) * ma.u * mb.u.adjoint();
            }
        }
    }
    return r;
}

// sigma^2 I + interference with independent phases across satellites.
inline CMat r_other(const PrecodingContext& ctx, const PrecoderSet& p, int k) {
    const int nr = ctx.nr();
    CMat r = ctx.sys().noise[k] * CMat::Identity(nr, nr);
    for (int j = 0; j < ctx.num_uts(); ++j) {
        if (j == k) {
            continue;
        }
        for (int s = 0; s < ctx.num_sats(); ++s) {
            if (!ctx.assoc().serves(s, j)) {
                continue;
            }
            const LinkMoments m = moments(ctx.sys().link(s, k));
            const double g = (vbar(ctx, s, k).transpose() * p.at(s, j)).squaredNorm();
            r += g * (m.rho * m.u * m.u.adjoint() + m.rho_t * m.sigma);
        }
    }
    return r;
}

// Monte-Carlo estimate of r_sig from explicit channel draws.
inline CMat r_sig_mc(const PrecodingContext& ctx, const PrecoderSet& p, int k, int n, std::uint64_t seed) {
    Rng rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    const int nr = ctx.nr();
    CMat acc = CMat::Zero(nr, nr);
    for (int t = 0; t < n; ++t) {
        CMat g = CMat::Zero(nr, ctx.sys().streams[k]);
        for (int s = 0; s < ctx.num_sats(); ++s) {
            if (!ctx.assoc().serves(s, k)) {
                continue;
            }
            const SCSI& l = ctx.sys().link(s, k);
            const LinkMoments m = moments(l);
            Eigen::SelfAdjointEigenSolver<CMat> es(m.sigma);
            const CMat half = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
                              es.eigenvectors().adjoint();
            CVec z(nr);
            for (int i = 0; i < nr; ++i) {
                z(i) = cx(nd(rng), nd(rng)) / std::sqrt(2.0);
            }
            const CVec ubar = std::sqrt(m.rho) * m.u + std::sqrt(m.rho_t) * half * z;
            const cx phi = std::polar(1.0, std::sqrt(l.phase_var) * nd(rng));
            g += phi * ubar * (vbar(ctx, s, k).transpose() * p.at(s, k));
        }
        acc += g * g.adjoint();
    }
    return acc / static_cast<double>(n);
}

inline double log2det(const CMat& a) {
    Eigen::SelfAdjointEigenSolver<CMat> es(a);
    return es.eigenvalues().array().log().sum() / std::log(2.0);
}

// log2 det(I + R_o^{-1} R_s) as a difference of two log-determinants.
inline double rate(const CMat& r_s, const CMat& r_o) { return log2det(r_s + r_o) - log2det(r_o); }

// dg/dW^* of a real function by central differences:
// (d/dRe + i d/dIm) / 2 entrywise.
inline CMat fd_grad_real(const std::function<double(const CMat&)>& f, const CMat& w, double h) {
    CMat g(w.rows(), w.cols());
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            CMat a = w, b = w;
            a(i, j) += h;
            b(i, j) -= h;
            const double dre = (f(a) - f(b)) / (2.0 * h);
            a = w;
            b = w;
            a(i, j) += cx(0.0, h);
            b(i, j) -= cx(0.0, h);
            const double dim = (f(a) - f(b)) / (2.0 * h);
            g(i, j) = 0.5 * cx(dre, dim);
        }
    }
    return g;
}

// Derivative of a function that depends on W^* only, from perturbations of
// the real part (d/dRe = dh/dW^*). The imaginary-direction derivative must
// equal -i times it; the larger mismatch is returned through im_mismatch.
inline CMat fd_grad_conj(const std::function<cx(const CMat&)>& f, const CMat& w, double h,
                         double* im_mismatch = nullptr) {
    CMat g(w.rows(), w.cols());
    double mis = 0.0;
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
        for (Eigen::Index j = 0; j < w.cols(); ++j) {
            CMat a = w, b = w;
            a(i, j) += h;
            b(i, j) -= h;
            g(i, j) = (f(a) - f(b)) / (2.0 * h);
            a = w;
            b = w;
            a(i, j) += cx(0.0, h);
            b(i, j) -= cx(0.0, h);
            const cx dim = (f(a) - f(b)) / (2.0 * h);
            mis = std::max(mis, std::abs(dim + cx(0.0, 1.0) * g(i, j)));
        }
    }
    if (im_mismatch) {
        *im_mismatch = mis;
    }
    return g;
}

inline double golden_section(const std::function<double(double)>& f, double a, double b, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - r * (b - a);
    double d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol * (1.0 + std::abs(a) + std::abs(b))) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Whether some 0/1 S x K matrix has column sums demand[k] and row sums <= cap[s],
// by exhaustive search.
inline bool association_exists(const std::vector<int>& demand, std::vector<int> cap, int k = 0) {
    const int K = static_cast<int>(demand.size());
    const int S = static_cast<int>(cap.size());
    if (k == K) {
        return true;
    }
    for (int mask = 0; mask < (1 << S); ++mask) {
        if (__builtin_popcount(mask) != demand[k]) {
            continue;
        }
        bool ok = true;
        for (int s = 0; s < S; ++s) {
            if ((mask >> s & 1) && cap[s] == 0) {
                ok = false;
            }
        }
        if (!ok) {
            continue;
        }
        for (int s = 0; s < S; ++s) {
            cap[s] -= mask >> s & 1;
        }
        if (association_exists(demand, cap, k + 1)) {
            return true;
        }
        for (int s = 0; s < S; ++s) {
            cap[s] += mask >> s & 1;
        }
    }
    return false;
}

// Free-space link budget in dB: 20 log10(c / (4 pi f d)) plus the array and
// element gains.
inline double friis_db(double d, double f, double tx_elem_dbi, int nt, double rx_dbi, int nr) {
    return 20.0 * std::log10(kSpeedOfLight / (4.0 * kPi * f * d)) + tx_elem_dbi + 10.0 * std::log10(nt) + rx_dbi +
           10.0 * std::log10(nr);
}

} // namespace msms::oracle

#endif
