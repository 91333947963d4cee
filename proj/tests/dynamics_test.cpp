#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "offlinemania/dynamics.hpp"
#include "offlinemania/errors.hpp"
#include "offlinemania/track.hpp"
#include "support.hpp"

using namespace omania;
using omania::testing::rectangle_spec;

TEST(Dynamics, OneStepFromRest) {
    PhysicsConfig cfg;
    VehicleState s;
    VehicleState n = step_dynamics(s, {0.0, 1.0}, cfg);
    // accelerate, then drag, both over one dt
    const double expected = (0.0 + 20.0 * 0.02) * (1.0 - 0.1 * 0.02);
    EXPECT_DOUBLE_EQ(n.speed, expected);
    EXPECT_NEAR(n.speed, 0.4, 1e-3);
    EXPECT_EQ(n.heading, 0.0);
    EXPECT_DOUBLE_EQ(n.position.x, expected * 0.02);
}

TEST(Dynamics, ReversesFromStandstill) {
    PhysicsConfig cfg;
    VehicleState s;
    VehicleState n = step_dynamics(s, {0.0, -1.0}, cfg);
    EXPECT_LT(n.speed, 0.0);
    EXPECT_LT(n.position.x, 0.0);
    for (int i = 0; i < 500; ++i) n = step_dynamics(n, {0.0, -1.0}, cfg);
    EXPECT_GE(n.speed, -cfg.v_rev_max);
}

TEST(Dynamics, BrakesHarderThanItReverses) {
    PhysicsConfig cfg;
    VehicleState s;
    s.speed = 10.0;
    s.velocity = {10.0, 0.0};
    VehicleState n = step_dynamics(s, {0.0, -1.0}, cfg);
    EXPECT_DOUBLE_EQ(n.speed, (10.0 - 30.0 * 0.02) * (1.0 - 0.1 * 0.02));
}

TEST(Dynamics, TopSpeedIsClamped) {
    PhysicsConfig cfg;
    VehicleState s;
    for (int i = 0; i < 5000; ++i) s = step_dynamics(s, {0.0, 1.0}, cfg);
    EXPECT_LE(s.speed, cfg.v_max);
    EXPECT_GT(s.speed, 30.0);
}

TEST(Dynamics, DragDecaysCoastingSpeed) {
    PhysicsConfig cfg;
    VehicleState s;
    s.speed = 10.0;
    for (int i = 0; i < 100; ++i) s = step_dynamics(s, {0.0, 0.0}, cfg);
    EXPECT_NEAR(s.speed, 10.0 * std::pow(1.0 - 0.1 * 0.02, 100), 1e-12);
}

TEST(Dynamics, FullRightSteerTracesTurningCircle) {
    PhysicsConfig cfg;
    VehicleState s;
    s.speed = 8.0;
    const double radius = cfg.wheelbase / std::tan(cfg.steer_max);
    std::vector<Vec2> path;
    double prev_heading = s.heading;
    for (int i = 0; i < 200; ++i) {
        s = step_dynamics(s, {1.0, 0.0}, cfg);
        // clockwise: heading goes down, unwrap for the comparison
        EXPECT_LT(std::remainder(s.heading - prev_heading, 2 * std::numbers::pi), 0.0);
        prev_heading = s.heading;
        path.push_back(s.position);
    }
    // circumcircle through three well separated points
    const Vec2 a = path[10], b = path[60], c = path[110];
    const double d = 2 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
    const Vec2 center{((norm_sq(a)) * (b.y - c.y) + norm_sq(b) * (c.y - a.y) + norm_sq(c) * (a.y - b.y)) / d,
                      ((norm_sq(a)) * (c.x - b.x) + norm_sq(b) * (a.x - c.x) + norm_sq(c) * (b.x - a.x)) / d};
    EXPECT_NEAR(norm(a - center), radius, 0.01 * radius);
    for (Vec2 p : path) EXPECT_NEAR(norm(p - center), norm(a - center), 0.01);
    // right turn from heading 0 puts the center below the car
    EXPECT_LT(center.y, 0.0);
}

TEST(Dynamics, Deterministic) {
    PhysicsConfig cfg;
    VehicleState a, b;
    for (int i = 0; i < 300; ++i) {
        const Action act{std::sin(i * 0.1), std::cos(i * 0.07)};
        a = step_dynamics(a, act, cfg);
        b = step_dynamics(b, act, cfg);
        ASSERT_EQ(a, b);
    }
}

TEST(Dynamics, ActionClamping) {
    EXPECT_EQ((Action{3.0, -7.0}.clamped()), (Action{1.0, -1.0}));
    Action nan = Action{std::numeric_limits<double>::quiet_NaN(), 0.5}.clamped();
    EXPECT_EQ(nan.steer, 0.0);
    EXPECT_EQ(nan.throttle, 0.5);
}

TEST(Dynamics, ConfigValidation) {
    PhysicsConfig cfg;
    EXPECT_NO_THROW(cfg.validate());
    cfg.dt = 0.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
    cfg = PhysicsConfig{};
    cfg.v_rev_max = 50.0;
    EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(Dynamics, ConfigJsonUsesDegrees) {
    PhysicsConfig cfg;
    nlohmann::json j = cfg;
    EXPECT_DOUBLE_EQ(j.at("steer_max_deg").get<double>(), 25.0);
    PhysicsConfig back = j.get<PhysicsConfig>();
    EXPECT_NEAR(back.steer_max, cfg.steer_max, 1e-15);
}

class Collision : public ::testing::Test {
protected:
    // bottom edge runs along y = 0; its outer wall is the line y = -6
    Track track{rectangle_spec(200, 100, 6)};
    PhysicsConfig cfg;
};

TEST_F(Collision, FarFromWallsIsUntouched) {
    Track wide(rectangle_spec(200, 100, 12));
    VehicleState s;
    s.position = {100, 0};
    s.speed = 5.0;
    s.velocity = {5.0, 0.0};
    VehicleState r = resolve_collision(s, {99.9, 0.0}, wide, cfg);
    EXPECT_FALSE(r.in_contact);
    EXPECT_EQ(r, s);
}

TEST_F(Collision, HeadOnStopsAtClearance) {
    VehicleState s;
    s.heading = -std::numbers::pi / 2;
    s.position = {100, -5.02};
    s.speed = 2.0;
    s.velocity = {0.0, -2.0};
    VehicleState r = resolve_collision(s, {100, -4.98}, track, cfg);
    EXPECT_TRUE(r.in_contact);
    EXPECT_EQ(r.impact_speed, 2.0);
    EXPECT_NEAR(dot(r.velocity, Vec2{0.0, 1.0}), 0.0, 1e-12);
    EXPECT_NEAR(r.speed, 0.0, 1e-12);
    EXPECT_NEAR(r.position.y - (-6.0), cfg.car_radius, 1e-9);
}

TEST_F(Collision, FastStepCannotTunnel) {
    VehicleState s;
    s.heading = -std::numbers::pi / 2;
    s.position = {100, -9.0};  // past the wall after one long step
    s.speed = 40.0;
    s.velocity = {0.0, -40.0};
    VehicleState r = resolve_collision(s, {100, -2.0}, track, cfg);
    EXPECT_TRUE(r.in_contact);
    EXPECT_NEAR(r.position.y, -5.0, 1e-6);
}

TEST_F(Collision, GrazingContactOnEveryStep) {
    PhysicsConfig slow = cfg;
    slow.drag = 1e-300;
    VehicleState s;
    s.position = {50, -5.0};  // touching the wall
    s.speed = 7.0;
    s.velocity = {7.0, 0.0};
    for (int k = 0; k < 50; ++k) {
        const Vec2 before = s.position;
        VehicleState moved = step_dynamics(s, {0.0, 0.0}, slow);
        s = resolve_collision(moved, before, track, slow);
        ASSERT_TRUE(s.in_contact) << "step " << k;
        EXPECT_DOUBLE_EQ(s.impact_speed, 7.0);
        EXPECT_DOUBLE_EQ(s.speed, 7.0);
    }
    EXPECT_NEAR(s.position.x, 50 + 50 * 7.0 * 0.02, 1e-9);
}

TEST_F(Collision, AngledHitKeepsTangentialShare) {
    VehicleState s;
    const double h = -std::numbers::pi / 4;
    s.heading = h;
    s.position = {100, -5.1};
    s.speed = 10.0;
    s.velocity = unit_from_angle(h) * 10.0;
    VehicleState r = resolve_collision(s, s.position - s.velocity * 0.02, track, cfg);
    EXPECT_TRUE(r.in_contact);
    EXPECT_DOUBLE_EQ(r.impact_speed, 10.0);
    // tangential part 10 cos45 survives, then is projected back onto the heading
    EXPECT_NEAR(r.speed, 10.0 * 0.5, 1e-9);
    EXPECT_NEAR(r.position.y, -5.0, 1e-9);
}
