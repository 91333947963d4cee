// omania: command-line front end for the racing environment, the tier
// policies and the .omd dataset tooling.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "offlinemania/dataset.hpp"
#include "offlinemania/env.hpp"
#include "offlinemania/errors.hpp"
#include "offlinemania/harness.hpp"
#include "offlinemania/policy.hpp"
#include "offlinemania/track.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kValidation = 3 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EnvOptions {
    std::string track_path;
    std::string config_path;
};

// Optional config file:
//   {"physics": {...PhysicsConfig...}, "reward": {"lambda": 50},
//    "max_range": 50, "episode_len": 2000}
omania::EnvConfig build_env(const EnvOptions& opt) {
    omania::EnvConfig cfg = omania::EnvConfig::canonical();
    if (!opt.track_path.empty()) cfg.track = std::make_shared<const omania::Track>(omania::Track::load(opt.track_path));
    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) throw omania::IOError("cannot open config " + opt.config_path);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
            if (doc.contains("physics")) cfg.physics = doc.at("physics").get<omania::PhysicsConfig>();
            if (doc.contains("reward")) cfg.reward.lambda = doc.at("reward").value("lambda", cfg.reward.lambda);
            if (doc.contains("max_range")) cfg.rays = omania::RayConfig::standard(doc.at("max_range").get<double>());
            cfg.episode_len = doc.value("episode_len", cfg.episode_len);
        } catch (const nlohmann::json::exception& e) {
            throw omania::ParseError("malformed config " + opt.config_path + ": " + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

std::unique_ptr<omania::Policy> policy_or_usage(const std::string& name) {
    try {
        return omania::make_policy(name);
    } catch (const omania::UnknownPolicy& e) {
        throw UsageError(e.what());
    }
}

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << '\n'; }

void print_stats(const omania::DatasetStats& st) {
    const auto& h = st.header;
    std::printf("count        %llu\n", static_cast<unsigned long long>(h.count));
    std::printf("env_version  %s\n", h.env_version.c_str());
    std::printf("created_at   %s\n", h.created_at.c_str());
    std::printf("episodes     %llu (timeout flags)\n", static_cast<unsigned long long>(st.episodes));
    std::printf("terminals    %llu\n", static_cast<unsigned long long>(st.terminals));
    std::printf("total reward %.3f\n", st.total_reward);
    if (!st.episode_returns.empty()) {
        double mean = 0.0;
        for (double r : st.episode_returns) mean += r;
        mean /= static_cast<double>(st.episode_returns.size());
        std::printf("mean episode return %.3f\n", mean);
    }
    std::printf("provenance:\n");
    for (const auto& p : h.provenance)
        std::printf("  %-24s %10llu  seed %llu\n", p.policy.c_str(), static_cast<unsigned long long>(p.count),
                    static_cast<unsigned long long>(p.seed));
    std::printf("%-10s %12s %12s %12s\n", "field", "min", "max", "mean");
    auto row = [](const std::string& name, const omania::FieldStats& f) {
        std::printf("%-10s %12.5g %12.5g %12.5g\n", name.c_str(), f.min, f.max, f.mean);
    };
    for (std::size_t i = 0; i < st.obs.size(); ++i) row("obs[" + std::to_string(i) + "]", st.obs[i]);
    row("steer", st.action[0]);
    row("throttle", st.action[1]);
    row("reward", st.reward);
}

nlohmann::json stats_json(const omania::DatasetStats& st) {
    auto field = [](const omania::FieldStats& f) { return nlohmann::json{{"min", f.min}, {"max", f.max}, {"mean", f.mean}}; };
    nlohmann::json obs = nlohmann::json::array();
    for (const auto& f : st.obs) obs.push_back(field(f));
    return {{"header", st.header},
            {"episodes", st.episodes},
            {"terminals", st.terminals},
            {"total_reward", st.total_reward},
            {"episode_returns", st.episode_returns},
            {"obs", obs},
            {"action", {field(st.action[0]), field(st.action[1])}},
            {"reward", field(st.reward)}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"OfflineMania racing environment and offline-RL dataset tools"};
    app.require_subcommand(1);
    EnvOptions env_opt;
    app.add_option("--track", env_opt.track_path, "Track file (default: OMD_TRACK_PATH or the bundled track)");
    app.add_option("--config", env_opt.config_path, "JSON config overriding physics/reward/sensing constants");

    std::string policy = "expert";
    std::uint64_t seed = 0;
    std::string out;
    std::string created_at;
    bool as_json = false;

    auto* rollout = app.add_subcommand("rollout", "Record one episode as a trajectory file");
    rollout->add_option("--policy", policy, "expert | medium | basic | random");
    rollout->add_option("--seed", seed, "Episode seed");
    rollout->add_option("--out", out, "Trajectory output (JSON)")->required();

    int episodes = 5;
    auto* evaluate = app.add_subcommand("evaluate", "Mean return and lap statistics over seeded episodes");
    evaluate->add_option("--policy", policy, "expert | medium | basic | random");
    evaluate->add_option("--episodes", episodes, "Number of episodes")->check(CLI::PositiveNumber);
    evaluate->add_option("--seed", seed, "Seed of the first episode");
    evaluate->add_flag("--json", as_json, "Print the report as JSON");

    std::uint64_t count = 100000;
    auto* gen = app.add_subcommand("gen-dataset", "Collect transitions from one policy into an .omd file");
    gen->add_option("--policy", policy, "expert | medium | basic | random");
    gen->add_option("-n,--count", count, "Number of transitions")->check(CLI::PositiveNumber);
    gen->add_option("--seed", seed, "Seed of the first episode");
    gen->add_option("--out", out, "Output .omd path")->required();
    gen->add_option("--created-at", created_at, "Header timestamp (default: now)");

    auto* suite = app.add_subcommand("gen-suite", "Write the six benchmark datasets");
    suite->add_option("--out", out, "Output directory")->required();
    suite->add_option("--seed", seed, "Suite seed");
    suite->add_option("--created-at", created_at, "Header timestamp (default: now)");

    std::vector<std::string> inputs;
    std::vector<double> ratios;
    auto* mixc = app.add_subcommand("mix-dataset", "Sample transitions from several .omd files at fixed ratios");
    mixc->add_option("--input", inputs, "Input .omd file (repeat)")->required();
    mixc->add_option("--ratio", ratios, "Fraction for the matching input (repeat)")->required();
    mixc->add_option("--total", count, "Output size")->required();
    mixc->add_option("--seed", seed, "Sampling seed");
    mixc->add_option("--out", out, "Output .omd path")->required();
    mixc->add_option("--created-at", created_at, "Header timestamp (default: now)");

    std::string file;
    auto* inspect = app.add_subcommand("inspect-dataset", "Print header, provenance and per-field statistics");
    inspect->add_option("file", file, ".omd file")->required();
    inspect->add_flag("--json", as_json, "Print as JSON");

    auto* validate = app.add_subcommand("validate-track", "Load and validate a track file");
    validate->add_option("file", file, "Track file")->required();

    int n_envs = 1;
    long n_steps = 100000;
    auto* bench = app.add_subcommand("bench", "Random-policy stepping throughput");
    bench->add_option("--envs", n_envs, "Instances in the batch")->check(CLI::PositiveNumber);
    bench->add_option("--steps", n_steps, "Steps per instance")->check(CLI::NonNegativeNumber);
    bench->add_option("--seed", seed, "Seed");

    auto* render = app.add_subcommand("render-replay", "Top-down SVG of a trajectory");
    render->add_option("file", file, "Trajectory file")->required();
    render->add_option("--out", out, "SVG output path")->required();

    auto* verify = app.add_subcommand("verify-replay", "Re-simulate a trajectory and compare rewards bit for bit");
    verify->add_option("file", file, "Trajectory file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*validate) {
            try {
                const omania::Track track = omania::Track::load(file);
                std::printf("ok: %s, %zu vertices, length %.3f m, half width %.2f m\n", track.name().c_str(),
                            track.centerline().size(), track.length(), track.half_width());
                return kOk;
            } catch (const omania::GeometryError& e) {
                std::fprintf(stderr, "invalid track: %s\n", e.what());
                return kValidation;
            }
        }
        if (*inspect) {
            const auto st = omania::dataset_stats(file);
            if (as_json) print_json(stats_json(st));
            else print_stats(st);
            return kOk;
        }
        if (created_at.empty()) created_at = omania::utc_timestamp();

        if (*mixc) {
            if (inputs.size() != ratios.size()) throw UsageError("give one --ratio per --input");
            std::vector<omania::Dataset> data;
            for (const auto& in : inputs) data.push_back(omania::read_dataset(in));
            std::vector<const omania::Dataset*> ptrs;
            for (const auto& d : data) ptrs.push_back(&d);
            const auto mixed = omania::mix(ptrs, ratios, count, seed, created_at);
            omania::write_dataset(out, mixed);
            for (const auto& p : mixed.header.provenance)
                std::printf("%-24s %llu\n", p.policy.c_str(), static_cast<unsigned long long>(p.count));
            return kOk;
        }

        const omania::EnvConfig env = build_env(env_opt);

        if (*rollout) {
            const auto p = policy_or_usage(policy);
            omania::Env instance(env);
            omania::Trajectory traj;
            const auto sum = omania::run_episode(*p, instance, seed, &traj);
            omania::save_trajectory(out, traj);
            std::printf("%s seed %llu: return %.3f, laps %d, contact steps %d -> %s\n", policy.c_str(),
                        static_cast<unsigned long long>(seed), sum.total_return, sum.laps, sum.collision_steps,
                        out.c_str());
            return kOk;
        }
        if (*evaluate) {
            const auto p = policy_or_usage(policy);
            const auto rep = omania::evaluate(*p, env, episodes, seed);
            if (as_json) {
                print_json(rep);
            } else {
                std::printf("policy %s, %d episodes, env %s\n", rep.policy.c_str(), rep.episodes, rep.env_version.c_str());
                std::printf("mean return %.2f (std %.2f)\n", rep.mean_return, rep.std_return);
                std::printf("mean laps %.2f, mean lap %.1f steps, median lap %.1f steps\n", rep.mean_laps,
                            rep.mean_lap_steps, rep.median_lap_steps);
                std::printf("mean contact steps per episode %.1f\n", rep.mean_collision_steps);
            }
            return kOk;
        }
        if (*gen) {
            const auto p = policy_or_usage(policy);
            const auto ds = omania::generate(*p, env, count, seed, created_at);
            omania::write_dataset(out, ds);
            std::printf("wrote %llu transitions to %s\n", static_cast<unsigned long long>(ds.header.count), out.c_str());
            return kOk;
        }
        if (*suite) {
            for (const auto& f : omania::generate_suite(env, out, seed, created_at)) {
                std::printf("%-12s %8llu  %s\n", f.name.c_str(), static_cast<unsigned long long>(f.header.count),
                            f.path.string().c_str());
                if (f.header.provenance.size() > 1)
                    for (const auto& p : f.header.provenance)
                        std::printf("    %-10s %8llu\n", p.policy.c_str(), static_cast<unsigned long long>(p.count));
            }
            return kOk;
        }
        if (*bench) {
            print_json(omania::run_bench(env, n_envs, n_steps, seed));
            return kOk;
        }
        if (*render) {
            const auto traj = omania::load_trajectory(file);
            std::ofstream svg(out);
            if (!svg) throw omania::IOError("cannot write " + out);
            svg << omania::render_svg(*env.track, traj, env.physics.v_max);
            return kOk;
        }
        if (*verify) {
            const auto traj = omania::load_trajectory(file);
            const auto check = omania::verify_replay(traj, env);
            if (!check.ok) {
                std::fprintf(stderr, "replay mismatch: %s\n", check.detail.c_str());
                return kValidation;
            }
            std::printf("ok: %zu steps replayed bit-identically\n", check.steps_checked);
            return kOk;
        }
    } catch (const UsageError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const omania::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kUsage;
    } catch (const omania::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kData;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kData;
    }
    return kUsage;
}
