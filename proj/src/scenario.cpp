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

#include "msms/scenario.hpp"

#include "msms/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace msms {

namespace {

Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(double s, Vec3 a) { return {s * a.x, s * a.y, s * a.z}; }
double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
double norm(Vec3 a) { return std::sqrt(dot(a, a)); }
Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
Vec3 unit(Vec3 a) { return (1.0 / norm(a)) * a; }

// Local east/north at a point of the sphere (up = unit position).
struct Frame {
    Vec3 up, east, north;
};

Frame local_frame(Vec3 position) {
    Frame f;
    f.up = unit(position);
    Vec3 e = cross(Vec3{0.0, 0.0, 1.0}, f.up);
    if (norm(e) < 1e-12) {
        e = Vec3{0.0, 1.0, 0.0}; // at a pole any horizontal axis will do
    }
    f.east = unit(e);
    f.north = cross(f.up, f.east);
    return f;
}

// Array-frame angles of unit direction d for an array with normal n,
// vertical axis ev, horizontal axis eh:
//   cos(theta) = d.ev, sin(theta) cos(phi) = d.eh, phi = atan2(d.n, d.eh).
void array_angles(Vec3 d, Vec3 n, Vec3 ev, Vec3 eh, double& theta, double& phi) {
    theta = std::acos(std::clamp(dot(d, ev), -1.0, 1.0));
    phi = std::atan2(dot(d, n), dot(d, eh));
}

// Point at geodesic angle alpha and bearing beta from unit vector c.
Vec3 offset_on_sphere(Vec3 c, double alpha, double beta) {
    const Frame f = local_frame(c);
    return std::cos(alpha) * c + std::sin(alpha) * (std::cos(beta) * f.north + std::sin(beta) * f.east);
}

// Uniform-by-area point on the spherical cap of angular radius cap around c.
Vec3 cap_point(Vec3 c, double cap, Rng& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double ca = 1.0 - u(rng) * (1.0 - std::cos(cap));
    const double beta = 2.0 * kPi * u(rng);
    return offset_on_sphere(c, std::acos(std::clamp(ca, -1.0, 1.0)), beta);
}

double elevation_from(Vec3 ut, Vec3 sat) {
    const Vec3 d = unit(sat - ut);
    return std::asin(std::clamp(dot(d, unit(ut)), -1.0, 1.0));
}

} // namespace

void ScenarioConfig::validate() const {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) {
            throw Error("scenario config: " + what);
        }
    };
    need(num_satellites >= 1, "num_satellites must be >= 1");
    need(num_uts >= 1, "num_uts must be >= 1");
    need(serving_per_ut >= 1, "serving_per_ut must be >= 1");
    need(serving_per_ut <= num_satellites, "serving_per_ut must not exceed num_satellites");
    need(max_uts_per_sat >= 1, "max_uts_per_sat must be >= 1");
    need(tx_array.vertical >= 1 && tx_array.horizontal >= 1, "tx_array dimensions must be >= 1");
    need(rx_array.vertical >= 1 && rx_array.horizontal >= 1, "rx_array dimensions must be >= 1");
    need(streams_per_ut >= 1, "streams_per_ut must be >= 1");
    need(streams_per_ut <= std::min(serving_per_ut, rx_array.size()),
         "streams_per_ut must satisfy M_k <= min(S_k, N_RV*N_RH) (got M_k=" + std::to_string(streams_per_ut) +
             ", S_k=" + std::to_string(serving_per_ut) + ", N_R=" + std::to_string(rx_array.size()) + ")");
    need(beams_per_sat >= 1, "beams_per_sat must be >= 1");
    need(beams_per_sat <= tx_array.size(), "beams_per_sat must not exceed N_TV*N_TH");
    need(carrier_freq > 0.0, "carrier_freq must be positive");
    need(subcarrier_spacing > 0.0, "subcarrier_spacing must be positive");
    need(tx_power_per_sat > 0.0, "tx_power_per_sat must be positive");
    need(coverage_radius > 0.0 && coverage_radius < kPi * kEarthRadius, "coverage_radius out of range");
    need(altitude > 0.0, "altitude must be positive");
    need(phase_error_var >= 0.0, "phase_error_var must be >= 0");
    need(rician_k_db_min <= rician_k_db_max, "rician_k range must be ordered");
    need(antenna_temp > 0.0, "antenna_temp must be positive");
    need(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0, "min_elevation_deg must lie in [0, 90)");
}

Geometry make_geometry(const std::vector<Vec3>& sats, const std::vector<Vec3>& uts, const Vec3& center) {
    Geometry g;
    g.num_sats = static_cast<int>(sats.size());
    g.num_uts = static_cast<int>(uts.size());
    g.center = center;
    g.sat_positions = sats;
    g.ut_positions = uts;
    g.angles.resize(sats.size() * uts.size());
    g.slant_range.resize(g.angles.size());
    g.elevation.resize(g.angles.size());
    for (int s = 0; s < g.num_sats; ++s) {
        const Frame fs = local_frame(sats[s]);
        for (int k = 0; k < g.num_uts; ++k) {
            const Frame fu = local_frame(uts[k]);
            const Vec3 diff = uts[k] - sats[s];
            const double r = norm(diff);
            if (!(r > 0.0) || !std::isfinite(r)) {
                throw Error("make_geometry: degenerate satellite/UT positions");
            }
            const Vec3 down = (1.0 / r) * diff;
            const int i = s * g.num_uts + k;
            LinkAngles& a = g.angles[i];
            array_angles(down, -1.0 * fs.up, fs.north, fs.east, a.theta_tx, a.phi_tx);
            array_angles(-1.0 * down, fu.up, fu.north, fu.east, a.theta_rx, a.phi_rx);
            g.slant_range[i] = r;
            g.elevation[i] = elevation_from(uts[k], sats[s]);
        }
    }
    return g;
}

Geometry generate_scenario(const ScenarioConfig& config) {
    config.validate();
    const std::uint64_t seed = config.rng_seed;
    const double cap = config.coverage_radius / kEarthRadius;
    const double min_el = config.min_elevation_deg * kPi / 180.0;

    Vec3 center;
    {
        Rng rng = substream(seed, Stream::Geometry, 0);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double z = 2.0 * u(rng) - 1.0;
        const double lon = 2.0 * kPi * u(rng);
        const double rxy = std::sqrt(std::max(0.0, 1.0 - z * z));
        center = Vec3{rxy * std::cos(lon), rxy * std::sin(lon), z};
    }

    // Per-entity substreams keep the first K UTs identical when K grows.
    std::vector<Vec3> uts(config.num_uts);
    for (int k = 0; k < config.num_uts; ++k) {
        Rng rng = substream(seed, Stream::Geometry, 1'000'000 + static_cast<std::uint64_t>(k));
        uts[k] = kEarthRadius * cap_point(center, cap, rng);
    }

    std::vector<Vec3> sats(config.num_satellites);
    constexpr int kMaxDraws = 10000;
    for (int s = 0; s < config.num_satellites; ++s) {
        Rng rng = substream(seed, Stream::Geometry, 2'000'000 + static_cast<std::uint64_t>(s));
        bool placed = false;
        for (int attempt = 0; attempt < kMaxDraws && !placed; ++attempt) {
            const Vec3 pos = (kEarthRadius + config.altitude) * cap_point(center, cap, rng);
            placed = std::all_of(uts.begin(), uts.end(),
                                 [&](const Vec3& ut) { return elevation_from(ut, pos) >= min_el; });
            if (placed) {
                sats[s] = pos;
            }
        }
        if (!placed) {
            throw Error("generate_scenario: could not place satellite " + std::to_string(s) +
                        " above the minimum elevation for all UTs; reduce coverage_radius");
        }
    }
    return make_geometry(sats, uts, center);
}

double path_gain(double distance, const ScenarioConfig& config) {
    if (!(distance > 0.0)) {
        throw Error("path_gain: distance must be positive");
    }
    const double fs = kSpeedOfLight / (4.0 * kPi * config.carrier_freq * distance);
    return db_to_linear(config.tx_element_gain_dbi) * config.tx_array.size() * db_to_linear(config.rx_gain_dbi) *
           config.rx_array.size() * fs * fs;
}

double noise_power(const ScenarioConfig& config) {
    return kBoltzmann * config.antenna_temp * config.subcarrier_spacing * db_to_linear(config.noise_figure_db);
}

std::vector<SCSI> derive_scsi(const Geometry& geom, const ScenarioConfig& config) {
    std::vector<SCSI> links(geom.angles.size());
    std::uniform_real_distribution<double> kdb(config.rician_k_db_min, config.rician_k_db_max);
    for (int s = 0; s < geom.num_sats; ++s) {
        for (int k = 0; k < geom.num_uts; ++k) {
            const int i = s * geom.num_uts + k;
            Rng rng = substream(config.rng_seed, {static_cast<std::uint64_t>(Stream::LinkStats),
                                                  static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(k)});
            const double kappa = db_to_linear(kdb(rng));
            links[i] = make_scsi(path_gain(geom.slant_range[i], config), kappa, geom.angles[i], config.tx_array,
                                 config.rx_array, config.phase_error_var, config.nlos_convention);
        }
    }
    return links;
}

System build_system(const Geometry& geom, const ScenarioConfig& config) {
    System sys;
    sys.num_sats = geom.num_sats;
    sys.num_uts = geom.num_uts;
    sys.tx = config.tx_array;
    sys.rx = config.rx_array;
    sys.links = derive_scsi(geom, config);
    sys.noise.assign(geom.num_uts, noise_power(config));
    sys.weights.assign(geom.num_uts, 1.0);
    sys.streams.assign(geom.num_uts, config.streams_per_ut);
    sys.sat_power.assign(geom.num_sats, config.tx_power_per_sat);
    sys.validate();
    return sys;
}

} // namespace msms
