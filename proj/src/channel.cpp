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

#include "msms/channel.hpp"

#include "msms/linalg.hpp"

#include <spdlog/spdlog.h>

#include <cmath>
#include <limits>

namespace msms {

double SCSI::los_weight() const {
    if (std::isinf(kappa)) {
        return gamma;
    }
    return kappa * gamma / (kappa + 1.0);
}

double SCSI::nlos_weight() const {
    if (convention == NlosConvention::PaperLiteral) {
        return los_weight();
    }
    if (std::isinf(kappa)) {
        return 0.0;
    }
    return gamma / (kappa + 1.0);
}

CVec SCSI::tx_steering() const { return upa_steering(angles.theta_tx, angles.phi_tx, tx); }

void SCSI::update_cache() {
    rx_steering = upa_steering(angles.theta_rx, angles.phi_rx, rx);
    if (nlos_cov.size() == 0) {
        nlos_cov = CMat::Identity(rx.size(), rx.size()) / static_cast<double>(rx.size());
    }
    const auto f = linalg::psd_factor(nlos_cov);
    if (f.clipped) {
        throw Error("SCSI: NLoS covariance is not positive semidefinite");
    }
    nlos_factor = f.factor;
}

void SCSI::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw Error("SCSI: gamma must be positive and finite");
    }
    if (!(kappa >= 0.0)) {
        throw Error("SCSI: kappa must be nonnegative");
    }
    if (std::abs(mean_phase) > 1.0 + 1e-12) {
        throw Error("SCSI: |mean phase| must not exceed 1");
    }
    if (phase_var < 0.0) {
        throw Error("SCSI: phase variance must be nonnegative");
    }
    if (nlos_cov.rows() != rx.size() || nlos_cov.cols() != rx.size()) {
        throw Error("SCSI: NLoS covariance must be N_R x N_R");
    }
    const double scale = std::max(nlos_cov.cwiseAbs().maxCoeff(), 1e-300);
    if (linalg::max_asymmetry(nlos_cov) > 1e-10 * scale) {
        throw Error("SCSI: NLoS covariance must be Hermitian");
    }
}

SCSI make_scsi(double gamma, double kappa, const LinkAngles& angles, ArrayShape tx, ArrayShape rx,
               double phase_var, NlosConvention convention) {
    SCSI s;
    s.gamma = gamma;
    s.kappa = kappa;
    s.angles = angles;
    s.tx = tx;
    s.rx = rx;
    s.phase_var = phase_var;
    s.mean_phase = cx(std::exp(-0.5 * phase_var), 0.0);
    s.convention = convention;
    s.nlos_cov = CMat::Identity(rx.size(), rx.size()) / static_cast<double>(rx.size());
    s.validate();
    s.update_cache();
    return s;
}

CVec steering_1d(int n, double x) {
    if (n < 1) {
        throw Error("steering_1d: N must be >= 1");
    }
    CVec v(n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (int m = 0; m < n; ++m) {
        v(m) = scale * std::polar(1.0, -kPi * m * x);
    }
    return v;
}

CVec upa_steering(double theta, double phi, ArrayShape shape) {
    const CVec a = steering_1d(shape.vertical, std::cos(theta));
    const CVec b = steering_1d(shape.horizontal, std::sin(theta) * std::cos(phi));
    CVec v(shape.size());
    for (int i = 0; i < shape.vertical; ++i) {
        v.segment(i * shape.horizontal, shape.horizontal) = a(i) * b;
    }
    return v;
}

CVec sample_rx_vector(const SCSI& scsi, Rng& rng) {
    const Eigen::Index nr = scsi.rx.size();
    const CVec z = complex_normal_vector(rng, nr);
    CVec u_bar = std::sqrt(scsi.los_weight()) * scsi.rx_steering;
    const double w = scsi.nlos_weight();
    if (w > 0.0) {
        u_bar += std::sqrt(w) * (scsi.nlos_factor * z);
    }
    return u_bar;
}

cx sample_phase(double phase_var, Rng& rng) {
    if (phase_var < 0.0) {
        throw Error("sample_phase: variance must be nonnegative");
    }
    if (phase_var == 0.0) {
        return {1.0, 0.0};
    }
    std::normal_distribution<double> n(0.0, std::sqrt(phase_var));
    return std::polar(1.0, n(rng));
}

ChannelSample sample_channel(const SCSI& scsi, Rng& rng) {
    ChannelSample out;
    out.rx_vector = sample_rx_vector(scsi, rng);
    out.phase = sample_phase(scsi.phase_var, rng);
    out.h = out.rx_vector * scsi.tx_steering().transpose();
    return out;
}

ScsiEstimate estimate_scsi(std::span<const ChannelSample> samples, const LinkAngles& angles,
                           ArrayShape tx, ArrayShape rx, NlosConvention convention) {
    if (samples.size() < 2) {
        throw Error("estimate_scsi: need at least 2 samples");
    }
    const Eigen::Index nr = rx.size();
    const CVec v = upa_steering(angles.theta_tx, angles.phi_tx, tx);
    const double n = static_cast<double>(samples.size());

    double power = 0.0;
    CVec mean_rx = CVec::Zero(nr);
    cx mean_phase{0.0, 0.0};
    std::vector<CVec> rx_vecs;
    rx_vecs.reserve(samples.size());
    for (const auto& smp : samples) {
        if (smp.h.rows() != nr || smp.h.cols() != tx.size()) {
            throw Error("estimate_scsi: sample dimensions do not match the arrays");
        }
        power += smp.h.squaredNorm();
        // H = u_bar v^T with ||v|| = 1, so H conj(v) recovers u_bar.
        rx_vecs.push_back(smp.h * v.conjugate());
        mean_rx += rx_vecs.back();
        mean_phase += smp.phase;
    }
    power /= n;
    mean_rx /= n;
    mean_phase /= n;

    CMat resid_cov = CMat::Zero(nr, nr);
    for (const auto& r : rx_vecs) {
        const CVec d = r - mean_rx;
        resid_cov += d * d.adjoint();
    }
    resid_cov /= (n - 1.0);

    ScsiEstimate est;
    resid_cov = linalg::project_psd(resid_cov, &est.clipped);
    if (est.clipped) {
        spdlog::warn("estimate_scsi: residual covariance had negative eigenvalues, clipped to 0");
    }

    SCSI& s = est.scsi;
    s.gamma = power;
    s.angles = angles;
    s.tx = tx;
    s.rx = rx;
    s.convention = convention;
    s.mean_phase = mean_phase;
    s.phase_var = std::max(0.0, -2.0 * std::log(std::max(std::abs(mean_phase), 1e-300)));

    const double los_power = mean_rx.squaredNorm();
    const double nlos_power = resid_cov.trace().real();
    if (nlos_power <= 1e-9 * power) {
        s.kappa = nlos_power > 0.0 ? los_power / nlos_power : std::numeric_limits<double>::infinity();
        s.nlos_cov = CMat::Zero(nr, nr);
    } else {
        s.kappa = los_power / nlos_power;
        s.nlos_cov = resid_cov / nlos_power;
    }
    if (convention == NlosConvention::PaperLiteral) {
        // NLoS weight equals the LoS weight, so kappa is not identifiable from
        // the power split; report the moment ratio as-is.
        spdlog::debug("estimate_scsi: paper-literal convention, kappa is the raw power ratio");
    }
    s.update_cache();
    return est;
}

} // namespace msms
