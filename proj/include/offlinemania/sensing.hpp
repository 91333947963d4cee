#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "offlinemania/dynamics.hpp"

namespace omania {

class Track;

inline constexpr std::size_t kNumRays = 15;
inline constexpr std::size_t kObsDim = 2 * kNumRays + 3;
inline constexpr std::size_t kActDim = 2;

/// Ray fan in front of the car. Offsets follow the steering convention:
/// negative angles point left of the heading, positive right.
struct RayConfig {
    std::size_t n_rays = kNumRays;
    double fov = std::numbers::pi;
    double max_range = 50.0;  // m
    std::vector<double> offsets;  // radians, left to right

    /// 15 rays evenly spaced over [-fov/2, +fov/2], both ends included.
    static RayConfig standard(double max_range = 50.0);

    /// Throws ConfigError unless there are exactly 15 offsets, symmetric
    /// about zero, and max_range > 0.
    void validate() const;
};

void to_json(nlohmann::json& j, const RayConfig& cfg);

struct RayReading {
    bool hit = false;
    double distance = 1.0;  // normalized by max_range; 1.0 on a miss
};

using RayScan = std::array<RayReading, kNumRays>;

/// [hit_0, dist_0, ..., hit_14, dist_14, v_fwd, v_lat, v_vert]
struct Observation {
    std::array<double, kObsDim> values{};

    bool operator==(const Observation&) const = default;
};

RayScan cast_rays(const VehicleState& state, const Track& track, const RayConfig& rays);

/// Velocities are in the car frame; the kinematic model has no lateral slip
/// and the track is flat, so v_lat and v_vert are always 0.
Observation assemble_observation(const VehicleState& state, const RayScan& scan);

}  // namespace omania
