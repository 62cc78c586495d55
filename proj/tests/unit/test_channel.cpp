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

#include "../oracles.hpp"
#include "../support.hpp"

#include <catch_amalgamated.hpp>

using namespace msms;

TEST_CASE("1-D steering has unit norm and linear phase", "[channel]") {
    const CVec v = steering_1d(8, 0.3);
    CHECK(std::abs(v.norm() - 1.0) < 1e-14);
    for (int m = 0; m < 8; ++m) {
        const cx ref = std::polar(1.0 / std::sqrt(8.0), -kPi * m * 0.3);
        CHECK(std::abs(v(m) - ref) < 1e-14);
    }
    CHECK_THROWS_AS(steering_1d(0, 0.0), Error);
}

TEST_CASE("UPA steering is the Kronecker product of the axis steerings", "[channel]") {
    const ArrayShape shape{3, 5};
    for (double theta : {0.1, 1.0, 2.5}) {
        for (double phi : {-1.0, 0.4, 3.0}) {
            const CVec v = upa_steering(theta, phi, shape);
            const CVec ref = oracle::upa(theta, phi, shape);
            CHECK((v - ref).norm() < 1e-13);
            const CVec kv = steering_1d(3, std::cos(theta));
            const CVec kh = steering_1d(5, std::sin(theta) * std::cos(phi));
            CVec kr(15);
            for (int i = 0; i < 3; ++i) {
                kr.segment(5 * i, 5) = kv(i) * kh;
            }
            CHECK((v - kr).norm() < 1e-13);
        }
    }
}

TEST_CASE("LoS and NLoS weights", "[channel]") {
    LinkAngles a;
    SCSI s = make_scsi(2.0, 3.0, a, {2, 2}, {2, 2}, 0.5);
    CHECK(std::abs(s.los_weight() - 1.5) < 1e-15);
    CHECK(std::abs(s.nlos_weight() - 0.5) < 1e-15);
    CHECK(std::abs(s.mean_phase - std::exp(-0.25)) < 1e-15);
    CHECK(std::abs(s.nlos_cov.trace().real() - 1.0) < 1e-15);
    SCSI p = make_scsi(2.0, 3.0, a, {2, 2}, {2, 2}, 0.5, NlosConvention::PaperLiteral);
    CHECK(std::abs(p.nlos_weight() - 1.5) < 1e-15);
    SCSI los = make_scsi(2.0, std::numeric_limits<double>::infinity(), a, {2, 2}, {2, 2}, 0.0);
    CHECK(los.los_weight() == 2.0);
    CHECK(los.nlos_weight() == 0.0);
}

TEST_CASE("invalid sCSI is rejected", "[channel]") {
    LinkAngles a;
    CHECK_THROWS_AS(make_scsi(-1.0, 3.0, a, {2, 2}, {2, 2}, 0.5), Error);
    CHECK_THROWS_AS(make_scsi(1.0, -3.0, a, {2, 2}, {2, 2}, 0.5), Error);
    CHECK_THROWS_AS(make_scsi(1.0, 3.0, a, {2, 2}, {2, 2}, -0.5), Error);
}

TEST_CASE("sampled channel power matches gamma", "[channel]") {
    LinkAngles a{0.7, 1.1, 0.4, 2.0};
    const SCSI s = make_scsi(3.0, 2.0, a, {2, 2}, {2, 2}, 0.5);
    Rng rng(11);
    const int n = 40000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = sample_channel(s, rng).h.squaredNorm();
        acc += p;
        acc2 += p * p;
    }
    const double mean = acc / n;
    const double se = std::sqrt((acc2 / n - mean * mean) / n);
    CHECK(std::abs(mean - 3.0) < 4.0 * se);
}

TEST_CASE("sampled channel has rank one with the transmit steering as row space", "[channel]") {
    LinkAngles a{0.7, 1.1, 0.4, 2.0};
    const SCSI s = make_scsi(1.0, 5.0, a, {4, 2}, {2, 2}, 0.5);
    Rng rng(12);
    const ChannelSample smp = sample_channel(s, rng);
    const CMat ref = smp.rx_vector * oracle::upa(0.7, 1.1, {4, 2}).transpose();
    CHECK((smp.h - ref).norm() < 1e-13);
}

TEST_CASE("phase error mean is exp(-zeta^2/2)", "[channel]") {
    Rng rng(13);
    const int n = 200000;
    cx acc{0.0, 0.0};
    for (int i = 0; i < n; ++i) {
        acc += sample_phase(0.8, rng);
    }
    acc /= static_cast<double>(n);
    CHECK(std::abs(acc.real() - std::exp(-0.4)) < 0.01);
    CHECK(std::abs(acc.imag()) < 0.01);
    CHECK(sample_phase(0.0, rng) == cx(1.0, 0.0));
}

TEST_CASE("estimate_scsi recovers the generating statistics", "[channel]") {
    LinkAngles a{0.9, 0.3, 0.6, 1.2};
    SCSI s = make_scsi(2.0, 4.0, a, {2, 2}, {2, 2}, 0.3);
    Rng rng(14);
    s.nlos_cov = test::random_unit_trace_psd(4, rng);
    s.update_cache();
    std::vector<ChannelSample> smp;
    for (int i = 0; i < 50000; ++i) {
        smp.push_back(sample_channel(s, rng));
    }
    const auto est = estimate_scsi(smp, a, {2, 2}, {2, 2});
    CHECK(std::abs(est.scsi.gamma - 2.0) < 0.05);
    CHECK(std::abs(est.scsi.kappa - 4.0) < 0.3);
    CHECK(std::abs(est.scsi.phase_var - 0.3) < 0.03);
    CHECK((est.scsi.nlos_cov - s.nlos_cov).norm() < 0.05);
    CHECK_THROWS_AS(estimate_scsi(std::span<const ChannelSample>(smp.data(), 1), a, {2, 2}, {2, 2}), Error);
}
