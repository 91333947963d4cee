#include "offlinemania/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "offlinemania/errors.hpp"
#include "offlinemania/track.hpp"

namespace omania {

namespace {

// A disc within this distance of a wall counts as touching it.
constexpr double kContactTolerance = 1e-6;
constexpr int kMaxPushIterations = 8;

}  // namespace

void PhysicsConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw ConfigError(std::string("physics.") + name + " must be positive");
    };
    positive(dt, "dt");
    positive(v_max, "v_max");
    positive(v_rev_max, "v_rev_max");
    positive(a_max, "a_max");
    positive(b_max, "b_max");
    positive(drag, "drag");
    positive(wheelbase, "wheelbase");
    positive(steer_max, "steer_max");
    positive(car_radius, "car_radius");
    if (!(v_rev_max < v_max)) throw ConfigError("physics.v_rev_max must be below v_max");
}

void to_json(nlohmann::json& j, const PhysicsConfig& c) {
    j = {{"dt", c.dt},
         {"v_max", c.v_max},
         {"v_rev_max", c.v_rev_max},
         {"a_max", c.a_max},
         {"b_max", c.b_max},
         {"drag", c.drag},
         {"wheelbase", c.wheelbase},
         {"steer_max_deg", rad_to_deg(c.steer_max)},
         {"car_radius", c.car_radius}};
}

void from_json(const nlohmann::json& j, PhysicsConfig& c) {
    PhysicsConfig out;
    out.dt = j.value("dt", out.dt);
    out.v_max = j.value("v_max", out.v_max);
    out.v_rev_max = j.value("v_rev_max", out.v_rev_max);
    out.a_max = j.value("a_max", out.a_max);
    out.b_max = j.value("b_max", out.b_max);
    out.drag = j.value("drag", out.drag);
    out.wheelbase = j.value("wheelbase", out.wheelbase);
    if (j.contains("steer_max_deg")) out.steer_max = deg_to_rad(j.at("steer_max_deg").get<double>());
    out.car_radius = j.value("car_radius", out.car_radius);
    c = out;
}

Action Action::clamped() const {
    auto clamp1 = [](double v) { return std::isnan(v) ? 0.0 : std::clamp(v, -1.0, 1.0); };
    return {clamp1(steer), clamp1(throttle)};
}

VehicleState step_dynamics(const VehicleState& state, Action action, const PhysicsConfig& cfg) {
    VehicleState next = state;
    double accel;
    if (action.throttle >= 0.0)
        accel = cfg.a_max * action.throttle;
    else
        accel = (state.speed > 0.0 ? cfg.b_max : cfg.a_max) * action.throttle;
    double speed = state.speed + accel * cfg.dt;
    speed *= 1.0 - cfg.drag * cfg.dt;
    speed = std::clamp(speed, -cfg.v_rev_max, cfg.v_max);

    // positive steer turns right, i.e. clockwise
    const double yaw_rate = speed / cfg.wheelbase * std::tan(action.steer * cfg.steer_max);
    next.heading = wrap_angle(state.heading - yaw_rate * cfg.dt);
    const Vec2 forward = unit_from_angle(next.heading);
    next.position = state.position + forward * (speed * cfg.dt);
    next.speed = speed;
    next.velocity = forward * speed;
    next.in_contact = false;
    next.impact_speed = 0.0;
    return next;
}

VehicleState resolve_collision(const VehicleState& state, Vec2 previous_position, const Track& track,
                               const PhysicsConfig& cfg) {
    VehicleState out = state;
    const auto walls = track.wall_segments();
    const auto normals = track.wall_normals();
    const SegmentGrid& grid = track.wall_grid();

    // Swept check: a long step may carry the center across a wall line.
    const Vec2 travel = out.position - previous_position;
    const double dist = norm(travel);
    if (dist > 0.5 * cfg.car_radius) {
        const double t = grid.raycast(previous_position, travel * (1.0 / dist), dist);
        if (std::isfinite(t)) out.position = previous_position + travel * (t / dist * (1.0 - 1e-6));
    }

    bool touched = false;
    Vec2 v = out.velocity;
    for (int iter = 0; iter < kMaxPushIterations; ++iter) {
        double best_d = std::numeric_limits<double>::infinity();
        Vec2 best_q;
        std::uint32_t best_i = 0;
        grid.around(out.position, cfg.car_radius + kContactTolerance, [&](std::uint32_t i) {
            const Vec2 q = point_on(walls[i], closest_param(walls[i], out.position));
            const double d = norm(out.position - q);
            if (d < best_d || (d == best_d && i < best_i)) {
                best_d = d;
                best_q = q;
                best_i = i;
            }
        });
        if (best_d >= cfg.car_radius + kContactTolerance) break;
        touched = true;
        Vec2 n = best_d > 1e-12 ? (out.position - best_q) * (1.0 / best_d) : normals[best_i];
        // the disc center must stay on the corridor side of the wall
        if (dot(n, normals[best_i]) < 0.0) n = normals[best_i];
        const double vn = dot(v, n);
        if (vn < 0.0) v -= n * vn;
        if (best_d >= cfg.car_radius) break;  // touching, not penetrating
        out.position = best_q + n * cfg.car_radius;
    }
    if (!touched) return out;

    out.in_contact = true;
    out.impact_speed = norm(state.velocity);
    // the kinematic model keeps velocity on the heading
    const Vec2 forward = unit_from_angle(out.heading);
    out.speed = dot(v, forward);
    out.velocity = forward * out.speed;
    return out;
}

}  // namespace omania
