#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "offlinemania/dataset.hpp"
#include "offlinemania/env.hpp"
#include "offlinemania/policy.hpp"

namespace omania {

struct TrajectoryStep {
    Vec2 position;
    double heading = 0.0;
    double speed = 0.0;
    Action action;  // as applied (clamped)
    double reward = 0.0;
    bool in_contact = false;
    double u = 0.0;
    int lap_count = 0;
};

/// Recorded episode. Replaying `steps[i].action` from `seed` reproduces the
/// rewards exactly. Stored as JSON.
struct Trajectory {
    std::string env_version;
    std::uint64_t seed = 0;
    std::string policy;
    std::vector<TrajectoryStep> steps;
};

void to_json(nlohmann::json& j, const Trajectory& t);
void from_json(const nlohmann::json& j, Trajectory& t);
void save_trajectory(const std::filesystem::path& path, const Trajectory& t);
/// Throws FormatError for unreadable, malformed or empty trajectories.
Trajectory load_trajectory(const std::filesystem::path& path);

struct EpisodeSummary {
    std::uint64_t seed = 0;
    double total_return = 0.0;
    double positive_reward = 0.0;  // sum of the positive per-step rewards
    double start_u = 0.0;
    double final_u_best = 0.0;
    int steps = 0;
    int laps = 0;                  // completed laps, measured from the start position
    std::vector<int> lap_steps;    // duration of each completed lap
    int collision_steps = 0;
};

/// Policy noise stream for an episode seed.
inline std::uint64_t policy_seed(std::uint64_t episode_seed) { return derive_seed(episode_seed, kPolicyStream); }

/// Resets `env` with `seed` and runs one full episode. Records into
/// `record` when given.
EpisodeSummary run_episode(const Policy& policy, Env& env, std::uint64_t seed, Trajectory* record = nullptr);

struct EvalReport {
    std::string policy;
    int episodes = 0;
    double mean_return = 0.0;
    double std_return = 0.0;
    double mean_laps = 0.0;
    double mean_lap_steps = 0.0;    // over completed laps, 0 when there are none
    double median_lap_steps = 0.0;
    double mean_collision_steps = 0.0;
    std::vector<std::uint64_t> seeds;
    std::vector<double> returns;
    std::vector<int> laps;
    std::string env_version;
};

void to_json(nlohmann::json& j, const EvalReport& r);

/// Episodes use seeds base_seed, base_seed + 1, ...
EvalReport evaluate(const Policy& policy, const EnvConfig& env, int episodes, std::uint64_t base_seed);

struct ReplayCheck {
    bool ok = false;
    std::size_t steps_checked = 0;
    std::string detail;
};

/// Re-simulates the recorded actions and compares rewards and positions
/// bit for bit.
ReplayCheck verify_replay(const Trajectory& t, const EnvConfig& env);

/// Top-down SVG: walls, centerline, start area, the path colored by speed,
/// and markers on wall-contact steps.
std::string render_svg(const Track& track, const Trajectory& t, double v_max);

struct BenchReport {
    int n_envs = 0;
    long n_steps = 0;              // per env
    unsigned hardware_threads = 0;
    double single_steps_per_sec = 0.0;
    double batched_steps_per_sec = 0.0;  // aggregate over n_envs
    bool batched_matches_sequential = true;
};

void to_json(nlohmann::json& j, const BenchReport& r);

/// Random-policy throughput, single instance then `n_envs` batched.
/// Also re-runs the batch sequentially and compares every StepResult.
BenchReport run_bench(const EnvConfig& env, int n_envs, long n_steps, std::uint64_t seed);

struct SuiteRecipe {
    std::string name;
    std::uint64_t total = 0;
    std::vector<std::string> policies;  // one entry = a generated dataset
    std::vector<double> ratios;
};

/// basic, medium, expert (100k each), mix-large (200k at 90/7/3),
/// mix-small (5k at 90/7/3), basic-small (5k).
std::vector<SuiteRecipe> suite_recipes();

struct SuiteFile {
    std::string name;
    std::filesystem::path path;
    DatasetHeader header;
};

/// Writes the six .omd files into `out_dir` (created if needed).
std::vector<SuiteFile> generate_suite(const EnvConfig& env, const std::filesystem::path& out_dir, std::uint64_t seed,
                                      const std::string& created_at);

}  // namespace omania
