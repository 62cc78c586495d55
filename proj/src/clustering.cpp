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

#include <spdlog/spdlog.h>

#include <algorithm>
#include <deque>
#include <numeric>

namespace msms {

Association::Association(int num_sats, int num_uts) : o_(Eigen::MatrixXi::Zero(num_sats, num_uts)) {}

Association::Association(Eigen::MatrixXi o) : o_(std::move(o)) {}

std::vector<int> Association::serving(int k) const {
    std::vector<int> out;
    for (int s = 0; s < num_sats(); ++s) {
        if (serves(s, k)) {
            out.push_back(s);
        }
    }
    return out;
}

std::vector<int> Association::served(int s) const {
    std::vector<int> out;
    for (int k = 0; k < num_uts(); ++k) {
        if (serves(s, k)) {
            out.push_back(k);
        }
    }
    return out;
}

int Association::serving_count(int k) const { return o_.col(k).sum(); }

int Association::load(int s) const { return o_.row(s).sum(); }

Association full_association(int num_sats, int num_uts) {
    return Association(Eigen::MatrixXi::Ones(num_sats, num_uts));
}

void check_association(const Association& a, const std::vector<int>& serving_per_ut,
                       const std::vector<int>& capacity) {
    const int S = a.num_sats();
    const int K = a.num_uts();
    if (static_cast<int>(serving_per_ut.size()) != K || static_cast<int>(capacity.size()) != S) {
        throw Error("check_association: constraint vectors do not match O");
    }
    for (int s = 0; s < S; ++s) {
        for (int k = 0; k < K; ++k) {
            const int v = a.matrix()(s, k);
            if (v != 0 && v != 1) {
                throw Error("C5 violated: o(" + std::to_string(s) + "," + std::to_string(k) + ") is not binary");
            }
        }
    }
    for (int k = 0; k < K; ++k) {
        if (a.serving_count(k) != serving_per_ut[k]) {
            throw Error("C1 violated: UT " + std::to_string(k) + " has " + std::to_string(a.serving_count(k)) +
                        " serving satellites, needs " + std::to_string(serving_per_ut[k]));
        }
    }
    for (int s = 0; s < S; ++s) {
        if (a.load(s) > capacity[s]) {
            throw Error("C2 violated: satellite " + std::to_string(s) + " serves " + std::to_string(a.load(s)) +
                        " UTs, capacity " + std::to_string(capacity[s]));
        }
    }
}

std::string association_infeasibility(const std::vector<int>& serving_per_ut, const std::vector<int>& capacity,
                                      int num_sats) {
    for (std::size_t k = 0; k < serving_per_ut.size(); ++k) {
        if (serving_per_ut[k] < 0 || serving_per_ut[k] > num_sats) {
            return "UT " + std::to_string(k) + " asks for " + std::to_string(serving_per_ut[k]) +
                   " serving satellites but only " + std::to_string(num_sats) + " exist";
        }
    }
    // Bipartite degree condition: the m most demanding UTs need at most
    // sum_s min(cap_s, m) links.
    std::vector<int> d = serving_per_ut;
    std::sort(d.begin(), d.end(), std::greater<>());
    long long need = 0;
    for (std::size_t m = 1; m <= d.size(); ++m) {
        need += d[m - 1];
        long long have = 0;
        for (int c : capacity) {
            have += std::min<long long>(std::max(c, 0), static_cast<long long>(m));
        }
        if (need > have) {
            return "the " + std::to_string(m) + " most demanding UTs need " + std::to_string(need) +
                   " associations but satellite capacities allow " + std::to_string(have) +
                   " (K*S_k <= S*K_s^max is violated)";
        }
    }
    return {};
}

namespace {

struct ClusterState {
    const RMat& gamma;
    const std::vector<int>& capacity;
    Association o;
    std::vector<std::vector<int>> pref; // satellites by descending gamma per UT

    bool spare(int s) const { return o.load(s) < capacity[s]; }

    // Moves UTs along a shortest chain of full satellites so that UT k gains
    // one more satellite. Returns false if no such chain exists.
    bool augment(int k) {
        const int S = o.num_sats();
        std::vector<int> parent(S, -1), via(S, -1);
        std::vector<char> seen(S, 0);
        std::deque<int> queue;
        for (int s : pref[k]) {
            if (o.serves(s, k)) {
                continue;
            }
            if (spare(s)) {
                o.set(s, k, true);
                return true;
            }
            seen[s] = 1;
            queue.push_back(s);
        }
        while (!queue.empty()) {
            const int s = queue.front();
            queue.pop_front();
            for (int j : o.served(s)) {
                for (int t : pref[j]) {
                    if (seen[t] || o.serves(t, j)) {
                        continue;
                    }
                    seen[t] = 1;
                    parent[t] = s;
                    via[t] = j;
                    if (spare(t)) {
                        int cur = t;
                        while (parent[cur] >= 0) {
                            o.set(cur, via[cur], true);
                            o.set(parent[cur], via[cur], false);
                            cur = parent[cur];
                        }
                        o.set(cur, k, true);
                        return true;
                    }
                    queue.push_back(t);
                }
            }
        }
        return false;
    }
};

} // namespace

Association cluster(const RMat& gamma, const std::vector<int>& serving_per_ut, const std::vector<int>& capacity,
                    int fail_threshold, ClusterStats* stats) {
    const int S = static_cast<int>(gamma.rows());
    const int K = static_cast<int>(gamma.cols());
    if (static_cast<int>(serving_per_ut.size()) != K || static_cast<int>(capacity.size()) != S) {
        throw Error("cluster: S_k needs K entries and K_s^max needs S entries");
    }
    if (!gamma.allFinite() || (gamma.array() < 0.0).any()) {
        throw Error("cluster: channel powers must be finite and non-negative");
    }
    if (const auto why = association_infeasibility(serving_per_ut, capacity, S); !why.empty()) {
        throw Error("cluster: infeasible, " + why);
    }
    ClusterStats local;
    ClusterStats& st = stats ? *stats : local;
    st = ClusterStats{};

    ClusterState cs{gamma, capacity, Association(S, K), {}};
    cs.pref.resize(K);
    for (int k = 0; k < K; ++k) {
        auto& p = cs.pref[k];
        p.resize(S);
        std::iota(p.begin(), p.end(), 0);
        std::stable_sort(p.begin(), p.end(), [&](int a, int b) { return gamma(a, k) > gamma(b, k); });
    }
    std::vector<int> order(K);
    std::iota(order.begin(), order.end(), 0);
    const RVec total = gamma.colwise().sum();
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return total(a) > total(b); });

    std::vector<int> threshold(K);
    int max_threshold = 1;
    for (int k = 0; k < K; ++k) {
        threshold[k] = fail_threshold > 0 ? fail_threshold : S - serving_per_ut[k] + 1;
        max_threshold = std::max(max_threshold, threshold[k]);
    }
    const long long eviction_cap = static_cast<long long>(S) * K * max_threshold;

    Eigen::MatrixXi forced = Eigen::MatrixXi::Zero(S, K);
    std::vector<int> next(K, 0), fails(K, 0);
    std::vector<char> queued(K, 0);
    std::deque<int> queue(order.begin(), order.end());
    std::fill(queued.begin(), queued.end(), 1);
    Association& o = cs.o;

    while (!queue.empty()) {
        const int k = queue.front();
        queue.pop_front();
        queued[k] = 0;
        while (o.serving_count(k) < serving_per_ut[k] && next[k] < S) {
            if (fails[k] >= threshold[k]) {
                for (; next[k] < S; ++next[k]) {
                    const int s = cs.pref[k][next[k]];
                    if (!o.serves(s, k) && cs.spare(s)) {
                        o.set(s, k, true);
                        forced(s, k) = 1;
                        ++st.forced;
                    }
                }
                break;
            }
            const int s = cs.pref[k][next[k]++];
            if (o.serves(s, k)) {
                continue;
            }
            if (cs.spare(s)) {
                o.set(s, k, true);
                continue;
            }
            // Weakest UT on s that is not protected by a forced association;
            // on equal power the higher index loses.
            int weakest = -1;
            for (int j : o.served(s)) {
                if (forced(s, j)) {
                    continue;
                }
                if (weakest < 0 || gamma(s, j) <= gamma(s, weakest)) {
                    weakest = j;
                }
            }
            const bool cap_reached = st.evictions >= eviction_cap;
            if (weakest >= 0 && gamma(s, k) > gamma(s, weakest) && !cap_reached) {
                o.set(s, weakest, false);
                o.set(s, k, true);
                ++fails[weakest];
                ++st.evictions;
                if (!queued[weakest]) {
                    queue.push_back(weakest);
                    queued[weakest] = 1;
                }
            } else {
                ++fails[k];
                if (cap_reached && !st.eviction_cap_hit) {
                    st.eviction_cap_hit = true;
                    spdlog::warn("cluster: eviction cap {} reached, remaining UTs are force-associated", eviction_cap);
                }
                if (cap_reached) {
                    fails[k] = std::max(fails[k], threshold[k]);
                }
            }
        }
    }

    // Redundant satellite removal: keep each UT's S_k strongest satellites.
    for (int k = 0; k < K; ++k) {
        for (auto it = cs.pref[k].rbegin(); it != cs.pref[k].rend() && o.serving_count(k) > serving_per_ut[k]; ++it) {
            if (o.serves(*it, k)) {
                o.set(*it, k, false);
                ++st.removed;
            }
        }
    }

    // Greedy competition can strand a UT with fewer than S_k satellites;
    // augmenting chains complete the assignment whenever one exists.
    bool progress = true;
    while (progress) {
        progress = false;
        for (int k : order) {
            while (o.serving_count(k) < serving_per_ut[k] && cs.augment(k)) {
                ++st.repaired;
                progress = true;
            }
        }
    }
    if (st.repaired > 0) {
        spdlog::debug("cluster: {} associations placed by augmenting chains", st.repaired);
    }
    check_association(o, serving_per_ut, capacity);
    return o;
}

Association cluster(const RMat& gamma, int serving_per_ut, int capacity, int fail_threshold, ClusterStats* stats) {
    return cluster(gamma, std::vector<int>(gamma.cols(), serving_per_ut), std::vector<int>(gamma.rows(), capacity),
                   fail_threshold, stats);
}

} // namespace msms
