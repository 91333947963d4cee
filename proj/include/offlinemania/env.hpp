#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "offlinemania/dynamics.hpp"
#include "offlinemania/reward.hpp"
#include "offlinemania/rng.hpp"
#include "offlinemania/sensing.hpp"
#include "offlinemania/track.hpp"

namespace omania {

struct EnvConfig {
    std::shared_ptr<const Track> track;
    PhysicsConfig physics;
    RayConfig rays = RayConfig::standard();
    RewardConfig reward;
    int episode_len = 2000;

    /// Canonical track with default constants.
    static EnvConfig canonical();

    void validate() const;
};

/// Identifies the full normative configuration: a hash over the track
/// geometry and every physics, sensing, reward and episode constant.
/// Format: "<track name>@<16 hex digits>".
std::string env_version(const EnvConfig& cfg);

struct StepInfo {
    double u = 0.0;
    double u_best = 0.0;
    int lap_count = 0;
    bool in_contact = false;
    double impact_speed = 0.0;
    double speed = 0.0;
    Vec2 position;

    bool operator==(const StepInfo&) const = default;
};

struct StepResult {
    Observation observation;
    double reward = 0.0;
    bool terminated = false;  // never set: episodes only end by truncation
    bool truncated = false;
    StepInfo info;

    bool operator==(const StepResult&) const = default;
};

/// Privileged view handed to scripted controllers next to the observation.
struct PolicyInput {
    const Observation& observation;
    const VehicleState* vehicle = nullptr;
    const Track* track = nullptr;
    const PhysicsConfig* physics = nullptr;
};

/// One racing-environment instance. Single owner; not thread-safe.
class Env {
public:
    explicit Env(EnvConfig cfg, std::uint64_t seed = 0);

    /// Reseeds when `seed` is given, otherwise continues the start-pose
    /// stream. Returns the initial observation.
    Observation reset(std::optional<std::uint64_t> seed = std::nullopt);

    /// Throws EpisodeOver when called before reset or after truncation.
    StepResult step(Action action);

    const EnvConfig& config() const { return cfg_; }
    const Track& track() const { return *cfg_.track; }
    const std::string& version() const { return version_; }
    const VehicleState& vehicle() const { return vehicle_; }
    const ProgressTracker& tracker() const { return tracker_; }
    const Observation& observation() const { return obs_; }
    /// Unwrapped progress at reset.
    double start_progress() const { return start_u_; }
    int step_index() const { return step_index_; }
    bool episode_over() const { return !ready_; }

    PolicyInput policy_input() const { return {obs_, &vehicle_, cfg_.track.get(), &cfg_.physics}; }

private:
    EnvConfig cfg_;
    std::string version_;
    Rng start_rng_;
    VehicleState vehicle_;
    ProgressTracker tracker_;
    Observation obs_;
    double start_u_ = 0.0;
    int step_index_ = 0;
    bool ready_ = false;
};

/// Steps every env with its action. Instances may run in parallel; results
/// are identical to stepping them one after another. Throws LengthMismatch
/// when the spans differ in size.
std::vector<StepResult> batched_step(std::span<Env> envs, std::span<const Action> actions);

}  // namespace omania
