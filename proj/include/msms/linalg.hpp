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

#ifndef MSMS_LINALG_HPP
#define MSMS_LINALG_HPP

#include "msms/types.hpp"

namespace msms::linalg {

// (A + A^H) / 2
CMat hermitian_part(const CMat& a);

// max_{ij} |A_ij - conj(A_ji)|
double max_asymmetry(const CMat& a);

// Square factor L with L L^H = A for a Hermitian PSD A. Cholesky is tried
// first; semidefinite or slightly indefinite inputs fall back to an
// eigendecomposition with negative eigenvalues clipped to zero.
struct PsdFactor {
    CMat factor;
    bool used_cholesky = true;
    bool clipped = false;   // an eigenvalue below -tol * ||A|| was zeroed
    double min_eigenvalue = 0.0;
};
PsdFactor psd_factor(const CMat& a);

// Eigenvalue clipping to the PSD cone, result Hermitian.
CMat project_psd(const CMat& a, bool* clipped = nullptr);

// log det A for Hermitian positive definite A (natural log).
double logdet_hpd(const CMat& a);

// Solve A X = B for Hermitian positive definite A. A singular A gets a
// 1e-12 * trace(A) diagonal jitter and a logged warning.
CMat solve_hpd(const CMat& a, const CMat& b);

CMat inverse_hpd(const CMat& a);

// ||A - B||_F / ||A||_F, with ||A||_F = 0 treated as absolute error.
double rel_frobenius_error(const CMat& reference, const CMat& other);

} // namespace msms::linalg

#endif
