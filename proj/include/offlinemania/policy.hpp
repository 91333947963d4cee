#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "offlinemania/dynamics.hpp"
#include "offlinemania/env.hpp"
#include "offlinemania/rng.hpp"

namespace omania {

/// A driving policy. Implementations are immutable; all per-episode
/// randomness comes from the caller's stream. `act` returns clamped actions.
class Policy {
public:
    virtual ~Policy() = default;
    virtual Action act(const PolicyInput& input, Rng& rng) const = 0;
    virtual std::string_view name() const = 0;
    virtual bool deterministic() const = 0;
};

/// Uniform actions in [-1, 1]^2.
class RandomPolicy final : public Policy {
public:
    Action act(const PolicyInput& input, Rng& rng) const override;
    std::string_view name() const override { return "random"; }
    bool deterministic() const override { return false; }
};

struct PursuitConfig {
    // lookahead distance = lookahead + lookahead_time * speed
    double lookahead = 6.0;       // m
    double lookahead_time = 0.3;  // s
    // racing-line offset toward the inside of turns, per unit of
    // curvature * half_width^2; capped by the usable corridor
    double corner_cut_gain = 0.0;
    double target_speed_straight = 20.0;  // m/s
    // lateral acceleration budget for corners, v = sqrt(gain / |curvature|);
    // 0 disables corner slowdown
    double cornering_speed_gain = 0.0;  // m/s^2
    double braking_decel = 20.0;        // m/s^2 assumed when planning ahead
    double preview_distance = 60.0;     // m
    double steer_gain = 1.0;
    double speed_gain = 0.5;            // throttle per m/s of speed error
    double action_noise_sigma = 0.0;
    // after touching a wall, brake to a standstill and stay there
    bool stall_on_contact = false;
};

/// Pure pursuit toward a lookahead point on an inside-offset racing line,
/// with curvature-limited target speed. Reads the true pose and track
/// through the privileged part of PolicyInput.
class PursuitPolicy final : public Policy {
public:
    PursuitPolicy(std::string name, PursuitConfig cfg) : name_(std::move(name)), cfg_(cfg) {}

    Action act(const PolicyInput& input, Rng& rng) const override;
    std::string_view name() const override { return name_; }
    bool deterministic() const override { return cfg_.action_noise_sigma == 0.0; }
    const PursuitConfig& config() const { return cfg_; }

    /// Racing-line lateral offset at arc length s (positive = left).
    double racing_offset(const Track& track, double s, double car_radius) const;
    /// Target speed for the stretch of track starting at s.
    double target_speed(const Track& track, double s) const;

private:
    std::string name_;
    PursuitConfig cfg_;
};

PursuitConfig expert_config();
PursuitConfig medium_config();
PursuitConfig basic_config();

/// Builtin registry: "expert", "medium", "basic", "random".
/// Throws UnknownPolicy for anything else.
std::unique_ptr<Policy> make_policy(std::string_view name);
std::vector<std::string> policy_names();

}  // namespace omania
