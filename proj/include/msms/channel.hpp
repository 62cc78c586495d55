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

#ifndef MSMS_CHANNEL_HPP
#define MSMS_CHANNEL_HPP

#include "msms/rng.hpp"
#include "msms/types.hpp"

#include <span>
#include <vector>

namespace msms {

// Link angles in radians. Elevation/azimuth follow the UPA convention
// v_NV(cos theta) (x) v_NH(sin theta cos phi).
struct LinkAngles {
    double theta_tx = kPi / 2; // departure elevation
    double phi_tx = kPi / 2;   // departure azimuth
    double theta_rx = kPi / 2; // arrival elevation
    double phi_rx = kPi / 2;   // arrival azimuth
};

// Scaling of the NLoS term of the Rician channel.
//   Normalized:   H = (sqrt(rho) u + sqrt(gamma/(kappa+1)) z) v^T, E tr(HH^H) = gamma
//   PaperLiteral: H = (sqrt(rho) u + sqrt(kappa*gamma/(kappa+1)) z) v^T
// with z ~ CN(0, Sigma), tr(Sigma) = 1 and rho = kappa*gamma/(kappa+1).
enum class NlosConvention { Normalized, PaperLiteral };

// Statistical CSI of one satellite-UT link.
struct SCSI {
    double gamma = 1.0;       // average channel power E tr(HH^H)
    double kappa = 0.0;       // Rician factor (may be +inf)
    LinkAngles angles;
    CMat nlos_cov;            // Sigma, N_R x N_R Hermitian PSD, unit trace (or zero)
    cx mean_phase{1.0, 0.0};  // E{phi}
    double phase_var = 0.0;   // zeta^2 of the Gaussian phase model
    ArrayShape tx;
    ArrayShape rx;
    NlosConvention convention = NlosConvention::Normalized;

    // Cached by update_cache(): receive steering u and a square root of Sigma.
    CVec rx_steering;
    CMat nlos_factor;

    // rho = kappa*gamma/(kappa+1)
    double los_weight() const;
    // rho~ = gamma/(kappa+1) (Normalized) or kappa*gamma/(kappa+1) (PaperLiteral)
    double nlos_weight() const;
    CVec tx_steering() const;

    void update_cache();
    void validate() const;
};

// Builds an SCSI with default Sigma = I / N_R and mean phase exp(-zeta^2/2).
SCSI make_scsi(double gamma, double kappa, const LinkAngles& angles, ArrayShape tx, ArrayShape rx,
               double phase_var, NlosConvention convention = NlosConvention::Normalized);

// One realization of a satellite-UT channel: H = u_bar v^T and the
// synchronization phase error multiplying it.
struct ChannelSample {
    CMat h;        // N_R x N_T
    CVec rx_vector; // u_bar
    cx phase{1.0, 0.0};
};

// v_N(x) = N^{-1/2} [e^{-j pi 0 x}, ..., e^{-j pi (N-1) x}]^T
CVec steering_1d(int n, double x);

// v_NV(cos theta) (x) v_NH(sin theta cos phi)
CVec upa_steering(double theta, double phi, ArrayShape shape);

// u_bar = sqrt(rho) u + sqrt(rho~) Sigma^{1/2} z
CVec sample_rx_vector(const SCSI& scsi, Rng& rng);

// exp(j r), r ~ N(0, zeta^2)
cx sample_phase(double phase_var, Rng& rng);

ChannelSample sample_channel(const SCSI& scsi, Rng& rng);

struct ScsiEstimate {
    SCSI scsi;
    bool clipped = false; // residual covariance had negative eigenvalues
};

// Moment estimator of sCSI from realizations of one link. Angles are taken
// as known; gamma from mean tr(HH^H), LoS power from the mean receive
// vector, Sigma from the residual covariance.
ScsiEstimate estimate_scsi(std::span<const ChannelSample> samples, const LinkAngles& angles,
                           ArrayShape tx, ArrayShape rx,
                           NlosConvention convention = NlosConvention::Normalized);

} // namespace msms

#endif
