#include "offlinemania/policy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "offlinemania/errors.hpp"

namespace omania {

namespace {

// clearance kept between the racing line and a wall, beyond the car radius
constexpr double kLineMargin = 0.8;

}  // namespace

Action RandomPolicy::act(const PolicyInput&, Rng& rng) const {
    const double steer = rng.uniform(-1.0, 1.0);
    const double throttle = rng.uniform(-1.0, 1.0);
    return {steer, throttle};
}

double PursuitPolicy::racing_offset(const Track& track, double s, double car_radius) const {
    if (cfg_.corner_cut_gain == 0.0) return 0.0;
    // average curvature over a short window so the line eases in and out
    double kappa = 0.0;
    for (int k = -2; k <= 2; ++k) kappa += track.curvature_at(s + 3.0 * k);
    kappa /= 5.0;
    const double hw = track.half_width();
    const double cap = std::max(0.0, hw - car_radius - kLineMargin);
    return std::clamp(cfg_.corner_cut_gain * kappa * hw * hw, -cap, cap);
}

double PursuitPolicy::target_speed(const Track& track, double s) const {
    double target = cfg_.target_speed_straight;
    if (cfg_.cornering_speed_gain <= 0.0) return target;
    for (double d = 0.0; d <= cfg_.preview_distance; d += 2.0) {
        const double kappa = std::abs(track.curvature_at(s + d));
        if (kappa < 1e-6) continue;
        const double corner = std::sqrt(cfg_.cornering_speed_gain / kappa);
        target = std::min(target, std::sqrt(corner * corner + 2.0 * cfg_.braking_decel * d));
    }
    return target;
}

Action PursuitPolicy::act(const PolicyInput& input, Rng& rng) const {
    if (!input.vehicle || !input.track || !input.physics)
        throw std::invalid_argument("pursuit policy needs the privileged pose and track");
    const VehicleState& car = *input.vehicle;
    const Track& track = *input.track;
    const PhysicsConfig& phys = *input.physics;

    if (cfg_.stall_on_contact && car.in_contact) {
        const double stop = car.speed > 0.0 ? -car.speed / (phys.b_max * phys.dt) : -car.speed / (phys.a_max * phys.dt);
        return Action{0.0, stop}.clamped();
    }

    const double s = track.project(car.position).s;
    const double ld = cfg_.lookahead + cfg_.lookahead_time * std::abs(car.speed);
    const double s_target = s + ld;
    const Vec2 target = track.point_at(s_target) +
                        left_normal(track.tangent_at(s_target)) * racing_offset(track, s_target, phys.car_radius);

    const Vec2 forward = unit_from_angle(car.heading);
    const Vec2 r = target - car.position;
    const double dist = std::max(norm(r), 1e-3);
    const double alpha = std::atan2(cross(forward, r), dot(forward, r));  // positive = target on the left
    const double wheel = std::atan(phys.wheelbase * 2.0 * std::sin(alpha) / dist);
    double steer = -cfg_.steer_gain * wheel / phys.steer_max;

    double throttle = cfg_.speed_gain * (target_speed(track, s) - car.speed);

    if (cfg_.action_noise_sigma > 0.0) {
        steer += cfg_.action_noise_sigma * rng.normal();
        throttle += cfg_.action_noise_sigma * rng.normal();
    }
    return Action{steer, throttle}.clamped();
}

PursuitConfig expert_config() {
    PursuitConfig c;
    c.lookahead = 5.0;
    c.lookahead_time = 0.3;
    c.corner_cut_gain = 0.6;
    c.target_speed_straight = 30.0;
    c.cornering_speed_gain = 62.0;
    c.speed_gain = 0.5;
    return c;
}

PursuitConfig medium_config() {
    PursuitConfig c;
    c.lookahead = 7.7;
    c.lookahead_time = 0.2;
    c.corner_cut_gain = 1.0;
    c.target_speed_straight = 13.0;
    c.cornering_speed_gain = 0.0;
    c.action_noise_sigma = 0.3;
    return c;
}

PursuitConfig basic_config() {
    PursuitConfig c;
    c.lookahead = 4.0;
    c.lookahead_time = 0.0;
    c.target_speed_straight = 12.0;
    c.steer_gain = 0.25;
    c.speed_gain = 1.0;
    c.action_noise_sigma = 0.3;
    c.stall_on_contact = true;
    return c;
}

std::unique_ptr<Policy> make_policy(std::string_view name) {
    if (name == "expert") return std::make_unique<PursuitPolicy>("expert", expert_config());
    if (name == "medium") return std::make_unique<PursuitPolicy>("medium", medium_config());
    if (name == "basic") return std::make_unique<PursuitPolicy>("basic", basic_config());
    if (name == "random") return std::make_unique<RandomPolicy>();
    throw UnknownPolicy("unknown policy '" + std::string(name) + "' (expected expert, medium, basic or random)");
}

std::vector<std::string> policy_names() { return {"expert", "medium", "basic", "random"}; }

}  // namespace omania
