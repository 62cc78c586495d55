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

#include "msms/clustering.hpp"

#include "../oracles.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace msms;

TEST_CASE("competition keeps the stronger UT on a full satellite", "[clustering]") {
    RMat g(2, 2);
    g << 5.0, 4.0, //
        3.0, 1.0;
    ClusterStats st;
    Association a = cluster(g, 1, 1, 0, &st);
    CHECK(a.serves(0, 0));
    CHECK(a.serves(1, 1));
    CHECK(a.serving_count(0) == 1);
    CHECK(st.evictions == 0); // the newcomer is the weakest and moves on

    g << 4.0, 5.0, //
        3.0, 1.0;
    a = cluster(g, 1, 1, 0, &st);
    CHECK(a.serves(0, 1));
    CHECK(a.serves(1, 0));
    CHECK(st.evictions == 1);
}

TEST_CASE("without capacity pressure every UT keeps its strongest satellites", "[clustering]") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int rep = 0; rep < 50; ++rep) {
        const int S = 5, K = 7, Sk = 3;
        RMat g(S, K);
        for (int s = 0; s < S; ++s) {
            for (int k = 0; k < K; ++k) {
                g(s, k) = u(rng);
            }
        }
        const Association a = cluster(g, Sk, K);
        for (int k = 0; k < K; ++k) {
            std::vector<int> idx(S);
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](int x, int y) { return g(x, k) > g(y, k); });
            for (int i = 0; i < S; ++i) {
                CHECK(a.serves(idx[i], k) == (i < Sk));
            }
        }
    }
}

TEST_CASE("feasibility test agrees with exhaustive search", "[clustering]") {
    std::mt19937_64 rng(32);
    for (int rep = 0; rep < 400; ++rep) {
        const int S = 1 + static_cast<int>(rng() % 4);
        const int K = 1 + static_cast<int>(rng() % 5);
        std::vector<int> demand(K), cap(S);
        for (auto& d : demand) {
            d = 1 + static_cast<int>(rng() % S);
        }
        for (auto& c : cap) {
            c = static_cast<int>(rng() % (K + 1));
        }
        const bool exists = oracle::association_exists(demand, cap);
        CHECK(association_infeasibility(demand, cap, S).empty() == exists);
    }
}

TEST_CASE("clustering meets C1, C2 and C5 whenever an association exists", "[clustering]") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    int feasible = 0;
    for (int rep = 0; rep < 1000; ++rep) {
        const int S = 1 + static_cast<int>(rng() % 5);
        const int K = 1 + static_cast<int>(rng() % 8);
        std::vector<int> demand(K), cap(S);
        for (auto& d : demand) {
            d = 1 + static_cast<int>(rng() % S);
        }
        for (auto& c : cap) {
            c = 1 + static_cast<int>(rng() % K);
        }
        RMat g(S, K);
        for (int s = 0; s < S; ++s) {
            for (int k = 0; k < K; ++k) {
                g(s, k) = std::pow(10.0, 3.0 * u(rng));
            }
        }
        if (association_infeasibility(demand, cap, S).empty()) {
            ++feasible;
            const Association a = cluster(g, demand, cap);
            CHECK_NOTHROW(check_association(a, demand, cap));
        } else {
            CHECK_THROWS_AS(cluster(g, demand, cap), Error);
        }
    }
    CHECK(feasible > 300);
}

TEST_CASE("check_association names the violated constraint", "[clustering]") {
    Association a(2, 2);
    a.set(0, 0, true);
    a.set(0, 1, true);
    try {
        check_association(a, {1, 1}, {1, 1});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("C2") != std::string::npos);
    }
    try {
        check_association(a, {2, 1}, {2, 2});
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("C1") != std::string::npos);
    }
}

TEST_CASE("full association and accessors", "[clustering]") {
    const Association a = full_association(3, 4);
    CHECK(a.load(1) == 4);
    CHECK(a.serving_count(2) == 3);
    CHECK(a.serving(0) == std::vector<int>{0, 1, 2});
    CHECK(a.served(2) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("bad inputs are rejected", "[clustering]") {
    RMat g = RMat::Ones(2, 3);
    CHECK_THROWS_AS(cluster(g, 3, 3), Error);  // S_k > S
    CHECK_THROWS_AS(cluster(g, 2, 2), Error);  // K S_k > S K_max
    g(0, 0) = std::nan("");
    CHECK_THROWS_AS(cluster(g, 1, 3), Error);
}
