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

#ifndef MSMS_SCENARIO_HPP
#define MSMS_SCENARIO_HPP

#include "msms/channel.hpp"
#include "msms/system.hpp"
#include "msms/types.hpp"

#include <cstdint>
#include <vector>

namespace msms {

// Defaults follow the simulation table of the reference setup (S-band LEO,
// 600 km, 16x16 satellite UPA, 2x2 UT array).
struct ScenarioConfig {
    int num_satellites = 5;
    int num_uts = 48;
    int serving_per_ut = 3;     // S_k
    int max_uts_per_sat = 36;   // K_s^max
    ArrayShape tx_array{16, 16};
    ArrayShape rx_array{2, 2};
    int streams_per_ut = 2;     // M_k
    int beams_per_sat = 48;     // B_s
    double carrier_freq = 2.0e9;        // Hz
    double subcarrier_spacing = 30.0e3; // Hz
    double tx_power_per_sat = 1.0;      // W per subcarrier (30 dBm)
    double coverage_radius = 800.0e3;   // m
    double altitude = 600.0e3;          // m
    double phase_error_var = 0.5;       // rad^2
    double rician_k_db_min = 7.0;
    double rician_k_db_max = 15.0;
    double noise_figure_db = 7.0;
    double antenna_temp = 290.0;        // K
    double tx_element_gain_dbi = 6.0;
    double rx_gain_dbi = 0.0;
    double min_elevation_deg = 10.0;
    NlosConvention nlos_convention = NlosConvention::Normalized;
    std::uint64_t rng_seed = 1;

    // Throws Error naming the first violated constraint.
    void validate() const;
};

struct Vec3 {
    double x = 0.0, y = 0.0, z = 0.0;
};

struct Geometry {
    int num_sats = 0;
    int num_uts = 0;
    Vec3 center;                     // unit vector, scenario center on the sphere
    std::vector<Vec3> sat_positions; // Earth-centered, m
    std::vector<Vec3> ut_positions;  // Earth-centered, m
    std::vector<LinkAngles> angles;  // [s * K + k]
    std::vector<double> slant_range; // [s * K + k], m
    std::vector<double> elevation;   // [s * K + k], elevation seen from the UT, rad

    const LinkAngles& link_angles(int s, int k) const { return angles[s * num_uts + k]; }
};

// Random center on the sphere, UTs uniform (by area) on the spherical cap of
// radius coverage_radius, satellites at altitude above points of the same
// cap, redrawn until every UT sees every satellite above min_elevation_deg.
Geometry generate_scenario(const ScenarioConfig& config);

// Angles and ranges for given positions. Satellite arrays point at nadir
// (vertical axis north, horizontal axis east); UT arrays point at zenith.
Geometry make_geometry(const std::vector<Vec3>& sats, const std::vector<Vec3>& uts, const Vec3& center);

// G_tx N_T G_rx N_R (c / (4 pi f d))^2
double path_gain(double distance, const ScenarioConfig& config);

// k_B T df NF
double noise_power(const ScenarioConfig& config);

// sCSI per link [s * K + k]: FSPL power, Rician factor uniform in dB,
// Sigma = I / N_R, mean phase exp(-zeta^2 / 2).
std::vector<SCSI> derive_scsi(const Geometry& geom, const ScenarioConfig& config);

// derive_scsi plus noise, weights (1), streams and satellite budgets.
System build_system(const Geometry& geom, const ScenarioConfig& config);

} // namespace msms

#endif
