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

#ifndef MSMS_PRECODING_HPP
#define MSMS_PRECODING_HPP

#include "msms/beamspace.hpp"
#include "msms/clustering.hpp"
#include "msms/system.hpp"

#include <cstdint>
#include <vector>

namespace msms {

// Beam-domain precoders W_{s,k} (B_s x M_k), zero where o_{s,k} = 0.
struct PrecoderSet {
    int num_sats = 0;
    int num_uts = 0;
    std::vector<CMat> w;            // [s * K + k]
    std::vector<double> ut_budget;  // P~_k
    std::vector<CMat> c;            // C_k (iterative solver only)
    std::vector<CMat> d;            // D_k (iterative solver only)
    int iterations = 0;
    bool converged = false;
    std::vector<double> trace;      // weighted upper-bound sum rate after each iteration

    CMat& at(int s, int k) { return w[s * num_uts + k]; }
    const CMat& at(int s, int k) const { return w[s * num_uts + k]; }
    // sum_k ||W_{s,k}||_F^2
    double sat_power(int s) const;
    bool all_finite() const;
};

// Inputs shared by every precoder: the system, association and beam-domain
// steering, plus the Delta tensor and Sigma~ factors computed once.
// Holds references; the three inputs must outlive the context.
class PrecodingContext {
  public:
    PrecodingContext(const System& sys, const Association& assoc, const BeamDomain& beams);

    const System& sys() const { return *sys_; }
    const Association& assoc() const { return *assoc_; }
    const BeamDomain& beams() const { return *beams_; }
    int num_sats() const { return sys_->num_sats; }
    int num_uts() const { return sys_->num_uts; }
    int nr() const { return sys_->rx.size(); }
    // L_k = (S N_R + 1) M_k
    int aux_dim(int k) const { return (num_sats() * nr() + 1) * sys_->streams[k]; }

    const CMat& delta(int s1, int s2, int k) const { return delta_[(k * num_sats() + s1) * num_sats() + s2]; }
    const CMat& tilde_sigma(int s, int k) const { return tilde_sigma_[s * num_uts() + k]; }

    PrecoderSet zero_precoders() const;

  private:
    const System* sys_;
    const Association* assoc_;
    const BeamDomain* beams_;
    std::vector<CMat> delta_;
    std::vector<CMat> tilde_sigma_;
};

// E{H_bar_{s1} W W^H H_bar_{s2}^H phi_{s1} phi_{s2}^*} / (v_bar^T W W^H v_bar^*):
//   s1 = s2: rho u u^H + rho~ Sigma
//   s1 != s2: sqrt(rho1 rho2) phibar1 phibar2^* u1 u2^H
CMat compute_delta(const SCSI& a, const SCSI& b, bool same_satellite);

// Factor of (1 - |phibar|^2) rho u u^H + rho~ Sigma.
struct TildeSigma {
    CMat factor;
    bool clipped = false;
};
TildeSigma tilde_sigma(const SCSI& link);

// q_{s,j,k} = o_{s,j} W_{s,j}^H v_bar_{s,k}^*, length M_j.
CVec q_vector(const PrecodingContext& ctx, const PrecoderSet& p, int s, int j, int k);

struct CovPair {
    CMat sig;
    CMat other;     // includes sigma_k^2 I
    CMat sig_sqrt;  // N_R x L_k
};

// Square-root factor [sum_s phibar sqrt(rho) u q^H | Sigma~_s (I (x) q_s^H) ...].
// Column layout: first M_k columns, then satellite s occupies columns
// M_k + s N_R M_k + n M_k + m for receive index n and stream m.
CMat sqrt_sig(const PrecodingContext& ctx, const PrecoderSet& p, int k);

CovPair assemble_cov(const PrecodingContext& ctx, const PrecoderSet& p, int k);

// D = (R_sig + R_other)^{-1} R_sig^{1/2}
CMat update_D(const CovPair& cov);

struct CUpdate {
    CMat e;
    CMat c; // E^{-1}
};
// E = D^H (R_sig + R_other) D - D^H R^{1/2} - R^{1/2 H} D + I, C = E^{-1}.
CUpdate update_C(const CovPair& cov, const CMat& d);

// log2 det(I + R_other^{-1} R_sig)
double rate_from_cov(const CovPair& cov);

// Per-UT statistical upper-bound rates (unweighted).
std::vector<double> upper_bound_rates(const PrecodingContext& ctx, const PrecoderSet& p);

// Psi_k with Psi_k(a, b) = Tr(D C D^H Delta_{b,a,k}).
CMat psi_matrix(const PrecodingContext& ctx, int k, const CMat& c, const CMat& d);

// T_k (S x M_k), row s is t_{s,k}^T.
CMat t_matrix(const PrecodingContext& ctx, int k, const CMat& c, const CMat& d);

// Gradient data of UT k restricted to its serving satellites. The stacked
// precoder W_k = [W_{s,k}]_{s in sats} places satellite sats[i] at rows
// offsets[i] .. offsets[i] + B_s - 1. Blocks of non-serving satellites are
// identically zero in both Xi and V^H T, so dropping them changes nothing.
struct GradientPack {
    int ut = 0;
    std::vector<int> sats;
    std::vector<int> offsets;
    int dim = 0;
    CMat psi;   // S x S
    CMat t;     // S x M_k
    CMat xi;    // dim x dim, Hermitian PSD
    CMat vht;   // dim x M_k
    double beta = 1.0;
    double beta_tilde = 0.0;
};

// psi_all[j] = Psi_j for every UT (needed for the interference part of Xi).
GradientPack gradient_pack(const PrecodingContext& ctx, int k, const std::vector<CMat>& psi_all, const CMat& c_k,
                           const CMat& d_k);

// Stack / scatter W_k over the pack's satellite order.
CMat stack_precoder(const PrecodingContext& ctx, const PrecoderSet& p, const GradientPack& pack);
void scatter_precoder(const PrecodingContext& ctx, PrecoderSet& p, const GradientPack& pack, const CMat& wk);

struct WSolution {
    CMat w;      // eta * w_bar, ||w||_F^2 = P~
    CMat w_bar;  // beta (Xi + beta~ I)^{-1} V^H T
    double eta = 0.0;
    bool zero = false;
};
WSolution solve_W(const GradientPack& pack, double budget);

// dg/dW^* of the per-UT Lagrangian at (w, eta) with multiplier beta~/eta^2:
//   Xi w / eta^2 - beta V^H T / eta + beta~ w / eta^2
CMat lagrangian_gradient(const GradientPack& pack, const CMat& w, double eta);

// min(sqrt(P_s / sum_k ||W_{s,k}||^2), 1) per satellite.
void satellite_rescale(PrecoderSet& p, const System& sys);

enum class CdwmInit { Cdm, Random };

struct CdwmOptions {
    int max_iterations = 50;
    double tolerance = 1e-3; // bits
    double chi = 1.0;
    CdwmInit init = CdwmInit::Cdm;
    std::uint64_t seed = 0;  // random init only
};

PrecoderSet cdwmmse(const PrecodingContext& ctx, const CdwmOptions& opt = {});

// Closed form with D = [I 0], C = blkdiag(I, 0); first M_k columns kept.
// apply_satellite_rescale = false returns the per-UT normalized precoder.
PrecoderSet cdm_precoder(const PrecodingContext& ctx, bool apply_satellite_rescale = true);

// Location-information precoder: conjugate beam-domain steering per serving
// satellite, streams assigned round-robin, per-satellite power exactly P_s.
PrecoderSet lib_precoder(const PrecodingContext& ctx);

// One beam per (serving satellite, UT): the UT's strongest selected beam,
// streams round-robin, per-satellite power exactly P_s.
PrecoderSet dft_baseline(const PrecodingContext& ctx);

} // namespace msms

#endif
