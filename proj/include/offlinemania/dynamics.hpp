#pragma once

#include <nlohmann/json.hpp>

#include "offlinemania/geometry.hpp"

namespace omania {

class Track;

/// Kinematic bicycle parameters. All fields must be positive and
/// v_rev_max < v_max.
struct PhysicsConfig {
    double dt = 0.02;          // s
    double v_max = 40.0;       // m/s
    double v_rev_max = 10.0;   // m/s
    double a_max = 20.0;       // m/s^2, throttle and reverse
    double b_max = 30.0;       // m/s^2, braking while rolling forward
    double drag = 0.1;         // 1/s
    double wheelbase = 2.5;    // m
    double steer_max = deg_to_rad(25.0);  // rad
    double car_radius = 1.0;   // m

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

// steer_max is stored in radians but serialized in degrees (steer_max_deg)
void to_json(nlohmann::json& j, const PhysicsConfig& cfg);
void from_json(const nlohmann::json& j, PhysicsConfig& cfg);

/// Steering is -1 (full left) .. +1 (full right); throttle is -1 (brake or
/// reverse) .. +1 (full acceleration).
struct Action {
    double steer = 0.0;
    double throttle = 0.0;

    Action clamped() const;
    bool operator==(const Action&) const = default;
};

struct VehicleState {
    Vec2 position;
    double heading = 0.0;   // world angle, counter-clockwise from +x
    Vec2 velocity;          // world frame, always along the heading
    double speed = 0.0;     // signed, negative when reversing
    bool in_contact = false;
    double impact_speed = 0.0;  // |velocity| before wall resolution, 0 without contact

    bool operator==(const VehicleState&) const = default;
};

/// One semi-implicit Euler step of the kinematic bicycle. Expects a clamped
/// action. Clears the contact fields.
VehicleState step_dynamics(const VehicleState& state, Action action, const PhysicsConfig& cfg);

/// Resolves wall contact for the car disc after `step_dynamics` moved it
/// from `previous_position`. On contact the disc is pushed out to exactly
/// car_radius clearance, the velocity component into the wall is removed and
/// the speed is re-derived along the heading.
VehicleState resolve_collision(const VehicleState& state, Vec2 previous_position, const Track& track,
                               const PhysicsConfig& cfg);

}  // namespace omania
