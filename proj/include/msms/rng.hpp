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

#ifndef MSMS_RNG_HPP
#define MSMS_RNG_HPP

#include "msms/types.hpp"

#include <cstdint>
#include <initializer_list>
#include <random>

namespace msms {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent substream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Substream keyed by (master seed, path...). Distinct paths give
// statistically independent generators; the same path gives the same one.
inline Rng substream(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = mix64(seed);
    for (auto p : path) {
        h = mix64(h ^ mix64(p + 0x632be59bd9b4e019ULL));
    }
    return Rng(h);
}

// Stream tags for substream paths.
enum class Stream : std::uint64_t {
    Geometry = 1,
    LinkStats = 2,
    Evaluation = 3,
    Init = 4,
};

inline Rng substream(std::uint64_t seed, Stream tag, std::uint64_t index = 0) {
    return substream(seed, {static_cast<std::uint64_t>(tag), index});
}

// CN(0, 1) sample.
inline cx complex_normal(Rng& rng) {
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

inline CVec complex_normal_vector(Rng& rng, Eigen::Index n) {
    CVec z(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        z(i) = complex_normal(rng);
    }
    return z;
}

} // namespace msms

#endif
