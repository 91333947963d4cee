#include "offlinemania/sensing.hpp"

#include <cmath>

#include "offlinemania/errors.hpp"
#include "offlinemania/track.hpp"

namespace omania {

RayConfig RayConfig::standard(double max_range) {
    RayConfig cfg;
    cfg.max_range = max_range;
    cfg.offsets.resize(cfg.n_rays);
    for (std::size_t i = 0; i < cfg.n_rays; ++i)
        cfg.offsets[i] = -0.5 * cfg.fov + cfg.fov * static_cast<double>(i) / static_cast<double>(cfg.n_rays - 1);
    return cfg;
}

void RayConfig::validate() const {
    if (n_rays != kNumRays || offsets.size() != kNumRays) throw ConfigError("rays: exactly 15 rays are required");
    if (!(max_range > 0.0)) throw ConfigError("rays.max_range must be positive");
    for (std::size_t i = 0; i < kNumRays; ++i) {
        if (std::abs(offsets[i] + offsets[kNumRays - 1 - i]) > 1e-12)
            throw ConfigError("rays: offsets must be symmetric about 0");
        if (i > 0 && !(offsets[i] > offsets[i - 1])) throw ConfigError("rays: offsets must increase left to right");
    }
}

void to_json(nlohmann::json& j, const RayConfig& cfg) {
    nlohmann::json offsets = nlohmann::json::array();
    for (double o : cfg.offsets) offsets.push_back(rad_to_deg(o));
    j = {{"n_rays", cfg.n_rays}, {"fov_deg", rad_to_deg(cfg.fov)}, {"max_range", cfg.max_range}, {"offsets_deg", offsets}};
}

RayScan cast_rays(const VehicleState& state, const Track& track, const RayConfig& rays) {
    RayScan scan;
    const SegmentGrid& grid = track.wall_grid();
    for (std::size_t i = 0; i < kNumRays; ++i) {
        // positive offsets turn clockwise, matching the steering sign
        const Vec2 dir = unit_from_angle(state.heading - rays.offsets[i]);
        const double t = grid.raycast(state.position, dir, rays.max_range);
        if (std::isfinite(t)) scan[i] = {true, t / rays.max_range};
    }
    return scan;
}

Observation assemble_observation(const VehicleState& state, const RayScan& scan) {
    Observation obs;
    for (std::size_t i = 0; i < kNumRays; ++i) {
        obs.values[2 * i] = scan[i].hit ? 1.0 : 0.0;
        obs.values[2 * i + 1] = scan[i].distance;
    }
    obs.values[2 * kNumRays] = state.speed;
    obs.values[2 * kNumRays + 1] = 0.0;
    obs.values[2 * kNumRays + 2] = 0.0;
    return obs;
}

}  // namespace omania
