#include "offlinemania/env.hpp"

#include <cstdio>

#include <tbb/parallel_for.h>

#include "offlinemania/errors.hpp"

namespace omania {

namespace {

// bump when the simulation semantics change without any constant changing
constexpr const char* kModelRevision = "kinematic-bicycle/slide-contact/1";

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

EnvConfig EnvConfig::canonical() {
    EnvConfig cfg;
    cfg.track = std::shared_ptr<const Track>(&Track::canonical(), [](const Track*) {});
    return cfg;
}

void EnvConfig::validate() const {
    if (!track) throw ConfigError("env: no track");
    physics.validate();
    rays.validate();
    if (!(reward.lambda >= 0.0)) throw ConfigError("reward.lambda must be non-negative");
    if (episode_len <= 0) throw ConfigError("episode_len must be positive");
}

std::string env_version(const EnvConfig& cfg) {
    const nlohmann::json doc = {
        {"model", kModelRevision},
        {"track", cfg.track->spec()},
        {"physics", cfg.physics},
        {"rays", cfg.rays},
        {"reward", {{"lambda", cfg.reward.lambda}}},
        {"episode_len", cfg.episode_len},
    };
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a64(doc.dump())));
    return cfg.track->name() + "@" + hex;
}

Env::Env(EnvConfig cfg, std::uint64_t seed) : cfg_(std::move(cfg)), start_rng_(derive_seed(seed, kStartStream)) {
    cfg_.validate();
    version_ = env_version(cfg_);
}

Observation Env::reset(std::optional<std::uint64_t> seed) {
    if (seed) start_rng_.reseed(derive_seed(*seed, kStartStream));
    const StartPose pose = cfg_.track->sample_start(start_rng_);
    vehicle_ = VehicleState{};
    vehicle_.position = pose.position;
    vehicle_.heading = pose.heading;
    tracker_ = omania::start_progress(cfg_.track->project(pose.position).s);
    start_u_ = tracker_.u;
    step_index_ = 0;
    ready_ = true;
    obs_ = assemble_observation(vehicle_, cast_rays(vehicle_, *cfg_.track, cfg_.rays));
    return obs_;
}

StepResult Env::step(Action action) {
    if (!ready_) throw EpisodeOver(step_index_ == 0 ? "step called before reset" : "episode is over; call reset");
    const Track& track = *cfg_.track;
    const Vec2 before = vehicle_.position;
    vehicle_ = step_dynamics(vehicle_, action.clamped(), cfg_.physics);
    vehicle_ = resolve_collision(vehicle_, before, track, cfg_.physics);
    const ProgressStep progress = advance_progress(tracker_, track.project(vehicle_.position).s, track.length());
    tracker_ = progress.tracker;

    StepResult out;
    out.reward = compute_reward(progress.delta, vehicle_.in_contact, vehicle_.impact_speed, cfg_.reward);
    obs_ = assemble_observation(vehicle_, cast_rays(vehicle_, track, cfg_.rays));
    out.observation = obs_;
    ++step_index_;
    out.truncated = step_index_ == cfg_.episode_len;
    if (out.truncated) ready_ = false;
    out.info = {tracker_.u,       tracker_.u_best,        tracker_.lap_count, vehicle_.in_contact,
                vehicle_.impact_speed, vehicle_.speed, vehicle_.position};
    return out;
}

std::vector<StepResult> batched_step(std::span<Env> envs, std::span<const Action> actions) {
    if (envs.size() != actions.size())
        throw LengthMismatch("batched_step: " + std::to_string(envs.size()) + " envs but " +
                             std::to_string(actions.size()) + " actions");
    std::vector<StepResult> results(envs.size());
    // check up front so a misused instance cannot leave the batch half-stepped
    for (const Env& env : envs)
        if (env.episode_over()) throw EpisodeOver("batched_step: an env needs reset");
    tbb::parallel_for(std::size_t{0}, envs.size(), [&](std::size_t i) { results[i] = envs[i].step(actions[i]); });
    return results;
}

}  // namespace omania
