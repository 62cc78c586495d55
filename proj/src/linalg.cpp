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

#include "msms/linalg.hpp"

#include <spdlog/spdlog.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace msms::linalg {

CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

double max_asymmetry(const CMat& a) {
    if (a.size() == 0) {
        return 0.0;
    }
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

PsdFactor psd_factor(const CMat& a) {
    PsdFactor out;
    const Eigen::Index n = a.rows();
    if (n == 0) {
        return out;
    }
    const CMat h = hermitian_part(a);
    const double scale = h.cwiseAbs().maxCoeff();
    if (scale == 0.0) {
        out.factor = CMat::Zero(n, n);
        return out;
    }

    Eigen::LLT<CMat> llt(h);
    if (llt.info() == Eigen::Success) {
        const CMat l = llt.matrixL();
        // LLT succeeds on some numerically singular inputs with a garbage
        // trailing pivot; accept only if the diagonal stays meaningful.
        const double min_diag = l.diagonal().real().minCoeff();
        if (std::isfinite(min_diag) && min_diag > 1e-7 * std::sqrt(scale)) {
            out.factor = l;
            out.min_eigenvalue = min_diag * min_diag;
            return out;
        }
    }

    Eigen::SelfAdjointEigenSolver<CMat> eig(h);
    RVec vals = eig.eigenvalues();
    out.used_cholesky = false;
    out.min_eigenvalue = vals.minCoeff();
    if (out.min_eigenvalue < -1e-10 * scale) {
        out.clipped = true;
    }
    vals = vals.cwiseMax(0.0).cwiseSqrt();
    out.factor = eig.eigenvectors() * vals.asDiagonal();
    return out;
}

CMat project_psd(const CMat& a, bool* clipped) {
    const CMat h = hermitian_part(a);
    if (h.size() == 0) {
        return h;
    }
    Eigen::SelfAdjointEigenSolver<CMat> eig(h);
    RVec vals = eig.eigenvalues();
    const double scale = std::max(vals.cwiseAbs().maxCoeff(), 1e-300);
    if (clipped != nullptr) {
        *clipped = vals.minCoeff() < -1e-10 * scale;
    }
    vals = vals.cwiseMax(0.0);
    return hermitian_part(eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().adjoint());
}

double logdet_hpd(const CMat& a) {
    Eigen::LLT<CMat> llt(hermitian_part(a));
    if (llt.info() != Eigen::Success) {
        throw Error("logdet_hpd: matrix is not positive definite");
    }
    const CMat l = llt.matrixL();
    double acc = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) {
        acc += std::log(l(i, i).real());
    }
    return 2.0 * acc;
}

CMat solve_hpd(const CMat& a, const CMat& b) {
    const CMat h = hermitian_part(a);
    Eigen::LLT<CMat> llt(h);
    if (llt.info() == Eigen::Success) {
        return llt.solve(b);
    }
    const double jitter = 1e-12 * std::max(h.trace().real(), 1e-300);
    spdlog::warn("solve_hpd: singular system, adding {:.3e} diagonal jitter", jitter);
    CMat reg = h;
    reg.diagonal().array() += jitter;
    Eigen::LDLT<CMat> ldlt(reg);
    return ldlt.solve(b);
}

CMat inverse_hpd(const CMat& a) {
    return hermitian_part(solve_hpd(a, CMat::Identity(a.rows(), a.cols())));
}

double rel_frobenius_error(const CMat& reference, const CMat& other) {
    const double ref = reference.norm();
    const double diff = (reference - other).norm();
    return ref > 0.0 ? diff / ref : diff;
}

} // namespace msms::linalg
