#pragma once

namespace omania {

struct RewardConfig {
    double lambda = 50.0;  // wall-contact penalty per m/s of impact speed
};

/// Centerline progress beyond the episode best, minus lambda * impact speed
/// on every step the car touches a wall.
inline double compute_reward(double progress_delta, bool in_contact, double impact_speed, const RewardConfig& cfg) {
    return progress_delta - (in_contact ? cfg.lambda * impact_speed : 0.0);
}

}  // namespace omania
