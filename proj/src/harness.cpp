#include "offlinemania/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "offlinemania/errors.hpp"

namespace omania {

void to_json(nlohmann::json& j, const Trajectory& t) {
    nlohmann::json steps = nlohmann::json::array();
    for (const auto& s : t.steps) {
        steps.push_back({{"position", {s.position.x, s.position.y}},
                         {"heading", s.heading},
                         {"speed", s.speed},
                         {"action", {s.action.steer, s.action.throttle}},
                         {"reward", s.reward},
                         {"in_contact", s.in_contact},
                         {"u", s.u},
                         {"lap_count", s.lap_count}});
    }
    j = {{"format", "omania-trajectory/1"},
         {"env_version", t.env_version},
         {"seed", t.seed},
         {"policy", t.policy},
         {"steps", std::move(steps)}};
}

void from_json(const nlohmann::json& j, Trajectory& t) {
    t.env_version = j.at("env_version").get<std::string>();
    t.seed = j.at("seed").get<std::uint64_t>();
    t.policy = j.value("policy", "");
    t.steps.clear();
    for (const auto& s : j.at("steps")) {
        TrajectoryStep step;
        step.position = {s.at("position").at(0).get<double>(), s.at("position").at(1).get<double>()};
        step.heading = s.at("heading").get<double>();
        step.speed = s.at("speed").get<double>();
        step.action = {s.at("action").at(0).get<double>(), s.at("action").at(1).get<double>()};
        step.reward = s.at("reward").get<double>();
        step.in_contact = s.at("in_contact").get<bool>();
        step.u = s.at("u").get<double>();
        step.lap_count = s.at("lap_count").get<int>();
        t.steps.push_back(step);
    }
}

void save_trajectory(const std::filesystem::path& path, const Trajectory& t) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IOError("cannot write " + path.string());
    out << nlohmann::json(t).dump() << '\n';
    if (!out) throw IOError("write failed for " + path.string());
}

Trajectory load_trajectory(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IOError("cannot open trajectory " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw FormatError(path.string() + ": empty trajectory file");
    Trajectory t;
    try {
        t = nlohmann::json::parse(text).get<Trajectory>();
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(path.string() + ": malformed trajectory: " + e.what());
    }
    if (t.steps.empty()) throw FormatError(path.string() + ": trajectory has no steps");
    return t;
}

EpisodeSummary run_episode(const Policy& policy, Env& env, std::uint64_t seed, Trajectory* record) {
    EpisodeSummary sum;
    sum.seed = seed;
    env.reset(seed);
    Rng rng(policy_seed(seed));
    const double length = env.track().length();
    sum.start_u = env.start_progress();
    double next_lap = sum.start_u + length;
    int last_lap_step = 0;
    if (record) {
        record->env_version = env.version();
        record->seed = seed;
        record->policy = std::string(policy.name());
        record->steps.clear();
        record->steps.reserve(static_cast<std::size_t>(env.config().episode_len));
    }
    bool done = false;
    while (!done) {
        const Action action = policy.act(env.policy_input(), rng).clamped();
        const StepResult r = env.step(action);
        done = r.truncated || r.terminated;
        ++sum.steps;
        sum.total_return += r.reward;
        if (r.reward > 0.0) sum.positive_reward += r.reward;
        if (r.info.in_contact) ++sum.collision_steps;
        while (r.info.u_best >= next_lap) {
            sum.lap_steps.push_back(sum.steps - last_lap_step);
            last_lap_step = sum.steps;
            next_lap += length;
            ++sum.laps;
        }
        if (record) {
            const VehicleState& v = env.vehicle();
            record->steps.push_back({v.position, v.heading, v.speed, action, r.reward, r.info.in_contact, r.info.u,
                                     r.info.lap_count});
        }
    }
    sum.final_u_best = env.tracker().u_best;
    return sum;
}

void to_json(nlohmann::json& j, const EvalReport& r) {
    j = {{"policy", r.policy},
         {"episodes", r.episodes},
         {"mean_return", r.mean_return},
         {"std_return", r.std_return},
         {"mean_laps", r.mean_laps},
         {"mean_lap_steps", r.mean_lap_steps},
         {"median_lap_steps", r.median_lap_steps},
         {"mean_collision_steps", r.mean_collision_steps},
         {"seeds", r.seeds},
         {"returns", r.returns},
         {"laps", r.laps},
         {"env_version", r.env_version}};
}

EvalReport evaluate(const Policy& policy, const EnvConfig& env_cfg, int episodes, std::uint64_t base_seed) {
    if (episodes < 1) throw std::invalid_argument("evaluate: need at least one episode");
    Env env(env_cfg);
    EvalReport rep;
    rep.policy = std::string(policy.name());
    rep.episodes = episodes;
    rep.env_version = env.version();
    std::vector<int> lap_steps;
    double collisions = 0.0;
    for (int k = 0; k < episodes; ++k) {
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(k);
        const EpisodeSummary s = run_episode(policy, env, seed);
        rep.seeds.push_back(seed);
        rep.returns.push_back(s.total_return);
        rep.laps.push_back(s.laps);
        lap_steps.insert(lap_steps.end(), s.lap_steps.begin(), s.lap_steps.end());
        collisions += s.collision_steps;
    }
    const double n = episodes;
    rep.mean_return = std::accumulate(rep.returns.begin(), rep.returns.end(), 0.0) / n;
    double var = 0.0;
    for (double r : rep.returns) var += (r - rep.mean_return) * (r - rep.mean_return);
    rep.std_return = std::sqrt(var / n);
    rep.mean_laps = std::accumulate(rep.laps.begin(), rep.laps.end(), 0.0) / n;
    rep.mean_collision_steps = collisions / n;
    if (!lap_steps.empty()) {
        rep.mean_lap_steps = std::accumulate(lap_steps.begin(), lap_steps.end(), 0.0) / lap_steps.size();
        std::sort(lap_steps.begin(), lap_steps.end());
        const std::size_t m = lap_steps.size();
        rep.median_lap_steps = m % 2 ? lap_steps[m / 2] : 0.5 * (lap_steps[m / 2 - 1] + lap_steps[m / 2]);
    }
    return rep;
}

ReplayCheck verify_replay(const Trajectory& t, const EnvConfig& env_cfg) {
    ReplayCheck check;
    Env env(env_cfg);
    if (t.env_version != env.version()) {
        check.detail = "trajectory was recorded with env " + t.env_version + ", current env is " + env.version();
        return check;
    }
    env.reset(t.seed);
    for (const auto& step : t.steps) {
        if (env.episode_over()) {
            check.detail = "trajectory is longer than an episode";
            return check;
        }
        const StepResult r = env.step(step.action);
        if (r.reward != step.reward || !(env.vehicle().position == step.position)) {
            char buf[160];
            std::snprintf(buf, sizeof buf, "step %zu: recorded reward %.17g, replayed %.17g", check.steps_checked,
                          step.reward, r.reward);
            check.detail = buf;
            return check;
        }
        ++check.steps_checked;
    }
    check.ok = true;
    return check;
}

namespace {

std::string svg_points(std::span<const Vec2> pts, auto&& map) {
    std::string out;
    char buf[64];
    for (const Vec2& p : pts) {
        const Vec2 q = map(p);
        std::snprintf(buf, sizeof buf, "%.2f,%.2f ", q.x, q.y);
        out += buf;
    }
    return out;
}

// blue (slow) through green to red (fast)
std::string speed_color(double frac) {
    frac = std::clamp(frac, 0.0, 1.0);
    const double hue = 240.0 * (1.0 - frac);
    char buf[48];
    std::snprintf(buf, sizeof buf, "hsl(%.0f,85%%,45%%)", hue);
    return buf;
}

}  // namespace

std::string render_svg(const Track& track, const Trajectory& t, double v_max) {
    constexpr double kScale = 8.0;   // px per meter
    constexpr double kMargin = 4.0;  // m
    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    for (auto wall : {track.left_wall(), track.right_wall()})
        for (const Vec2& p : wall) {
            min_x = std::min(min_x, p.x);
            min_y = std::min(min_y, p.y);
            max_x = std::max(max_x, p.x);
            max_y = std::max(max_y, p.y);
        }
    min_x -= kMargin;
    min_y -= kMargin;
    max_x += kMargin;
    max_y += kMargin;
    // SVG y grows downward
    auto map = [&](Vec2 p) { return Vec2{(p.x - min_x) * kScale, (max_y - p.y) * kScale}; };

    std::ostringstream svg;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
                  (max_x - min_x) * kScale, (max_y - min_y) * kScale, (max_x - min_x) * kScale,
                  (max_y - min_y) * kScale);
    svg << buf;
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"#f4f1ea\"/>\n";
    svg << "<polygon points=\"" << svg_points(track.left_wall(), map)
        << "\" fill=\"#d9d4c7\" stroke=\"#222\" stroke-width=\"2\"/>\n";
    svg << "<polygon points=\"" << svg_points(track.right_wall(), map)
        << "\" fill=\"#f4f1ea\" stroke=\"#222\" stroke-width=\"2\"/>\n";
    svg << "<polygon points=\"" << svg_points(track.centerline(), map)
        << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\" stroke-dasharray=\"6,4\"/>\n";
    const auto corners = track.start_area().corners();
    svg << "<polygon points=\"" << svg_points(corners, map)
        << "\" fill=\"#3a3\" fill-opacity=\"0.25\" stroke=\"#3a3\" stroke-width=\"1\"/>\n";

    svg << "<g stroke-width=\"2\" stroke-linecap=\"round\">\n";
    for (std::size_t i = 1; i < t.steps.size(); ++i) {
        const Vec2 a = map(t.steps[i - 1].position);
        const Vec2 b = map(t.steps[i].position);
        std::snprintf(buf, sizeof buf, "<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\"/>\n", a.x, a.y,
                      b.x, b.y, speed_color(std::abs(t.steps[i].speed) / v_max).c_str());
        svg << buf;
    }
    svg << "</g>\n<g fill=\"none\" stroke=\"#d00\" stroke-width=\"1.5\">\n";
    for (const auto& s : t.steps) {
        if (!s.in_contact) continue;
        const Vec2 p = map(s.position);
        std::snprintf(buf, sizeof buf, "<circle cx=\"%.2f\" cy=\"%.2f\" r=\"5\"/>\n", p.x, p.y);
        svg << buf;
    }
    svg << "</g>\n";
    const double ret = std::accumulate(t.steps.begin(), t.steps.end(), 0.0,
                                       [](double acc, const TrajectoryStep& s) { return acc + s.reward; });
    std::snprintf(buf, sizeof buf,
                  "<text x=\"10\" y=\"20\" font-family=\"monospace\" font-size=\"14\">%s seed %llu: %zu steps, "
                  "return %.1f</text>\n",
                  t.policy.c_str(), static_cast<unsigned long long>(t.seed), t.steps.size(), ret);
    svg << buf << "</svg>\n";
    return svg.str();
}

void to_json(nlohmann::json& j, const BenchReport& r) {
    j = {{"n_envs", r.n_envs},
         {"n_steps", r.n_steps},
         {"hardware_threads", r.hardware_threads},
         {"single_steps_per_sec", r.single_steps_per_sec},
         {"batched_steps_per_sec", r.batched_steps_per_sec},
         {"batched_matches_sequential", r.batched_matches_sequential}};
}

BenchReport run_bench(const EnvConfig& env_cfg, int n_envs, long n_steps, std::uint64_t seed) {
    using clock = std::chrono::steady_clock;
    BenchReport rep;
    rep.n_envs = n_envs;
    rep.n_steps = n_steps;
    rep.hardware_threads = std::thread::hardware_concurrency();
    if (n_steps <= 0 || n_envs <= 0) return rep;

    const RandomPolicy policy;
    {
        Env env(env_cfg);
        Rng rng(policy_seed(seed));
        env.reset(seed);
        const auto t0 = clock::now();
        for (long i = 0; i < n_steps; ++i) {
            if (env.episode_over()) env.reset();
            env.step(policy.act(env.policy_input(), rng));
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        rep.single_steps_per_sec = n_steps / secs;
    }

    auto make_batch = [&] {
        std::vector<Env> envs;
        envs.reserve(n_envs);
        for (int i = 0; i < n_envs; ++i) {
            envs.emplace_back(env_cfg);
            envs.back().reset(seed + static_cast<std::uint64_t>(i));
        }
        return envs;
    };
    std::vector<Rng> rngs;
    for (int i = 0; i < n_envs; ++i) rngs.emplace_back(policy_seed(seed + static_cast<std::uint64_t>(i)));
    std::vector<Action> actions(n_envs);
    {
        auto envs = make_batch();
        const auto t0 = clock::now();
        for (long s = 0; s < n_steps; ++s) {
            for (int i = 0; i < n_envs; ++i) {
                if (envs[i].episode_over()) envs[i].reset();
                actions[i] = policy.act(envs[i].policy_input(), rngs[i]);
            }
            batched_step(envs, actions);
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        rep.batched_steps_per_sec = static_cast<double>(n_steps) * n_envs / secs;
    }

    // batch against one-by-one stepping, with fresh action streams
    auto batch = make_batch();
    auto serial = make_batch();
    for (int i = 0; i < n_envs; ++i) rngs[i] = Rng(derive_seed(seed + static_cast<std::uint64_t>(i), 0xbe4c));
    const long check_steps = std::min<long>(n_steps, env_cfg.episode_len);
    for (long s = 0; s < check_steps && rep.batched_matches_sequential; ++s) {
        for (int i = 0; i < n_envs; ++i) actions[i] = policy.act(batch[i].policy_input(), rngs[i]);
        const auto results = batched_step(batch, actions);
        for (int i = 0; i < n_envs; ++i)
            if (!(serial[i].step(actions[i]) == results[i])) rep.batched_matches_sequential = false;
    }
    return rep;
}

std::vector<SuiteRecipe> suite_recipes() {
    return {
        {"basic", 100000, {"basic"}, {1.0}},
        {"medium", 100000, {"medium"}, {1.0}},
        {"expert", 100000, {"expert"}, {1.0}},
        {"mix-large", 200000, {"basic", "medium", "expert"}, {0.90, 0.07, 0.03}},
        {"mix-small", 5000, {"basic", "medium", "expert"}, {0.90, 0.07, 0.03}},
        {"basic-small", 5000, {"basic"}, {1.0}},
    };
}

std::vector<SuiteFile> generate_suite(const EnvConfig& env, const std::filesystem::path& out_dir, std::uint64_t seed,
                                      const std::string& created_at) {
    std::filesystem::create_directories(out_dir);
    const auto basic = make_policy("basic");
    const auto medium = make_policy("medium");
    const auto expert = make_policy("expert");
    const std::string version = env_version(env);

    auto dataset_from = [&](const Policy& p, std::vector<Transition> records, std::uint64_t s) {
        Dataset ds;
        ds.header.count = records.size();
        ds.header.env_version = version;
        ds.header.provenance = {{std::string(p.name()), records.size(), s}};
        ds.header.created_at = created_at;
        ds.records = std::move(records);
        return ds;
    };

    // The basic dataset is the first half of a 200k pool; mix-large draws
    // its 180k basic transitions from the whole pool.
    const std::uint64_t basic_seed = derive_seed(seed, 1);
    std::vector<Transition> basic_pool = collect(*basic, env, 200000, basic_seed);
    Dataset basic_ds = dataset_from(*basic, {basic_pool.begin(), basic_pool.begin() + 100000}, basic_seed);
    Dataset basic_pool_ds = dataset_from(*basic, std::move(basic_pool), basic_seed);
    const std::uint64_t medium_seed = derive_seed(seed, 2);
    Dataset medium_ds = dataset_from(*medium, collect(*medium, env, 100000, medium_seed), medium_seed);
    const std::uint64_t expert_seed = derive_seed(seed, 3);
    Dataset expert_ds = dataset_from(*expert, collect(*expert, env, 100000, expert_seed), expert_seed);
    const std::uint64_t small_seed = derive_seed(seed, 4);
    Dataset basic_small = dataset_from(*basic, collect(*basic, env, 5000, small_seed), small_seed);

    const std::vector<double> ratios = {0.90, 0.07, 0.03};
    const std::vector<const Dataset*> large_inputs = {&basic_pool_ds, &medium_ds, &expert_ds};
    Dataset mix_large = mix(large_inputs, ratios, 200000, derive_seed(seed, 5), created_at);
    const std::vector<const Dataset*> small_inputs = {&basic_ds, &medium_ds, &expert_ds};
    Dataset mix_small = mix(small_inputs, ratios, 5000, derive_seed(seed, 6), created_at);

    std::vector<SuiteFile> files;
    auto emit = [&](const std::string& name, const Dataset& ds) {
        const auto path = out_dir / (name + ".omd");
        write_dataset(path, ds);
        files.push_back({name, path, ds.header});
    };
    emit("basic", basic_ds);
    emit("medium", medium_ds);
    emit("expert", expert_ds);
    emit("mix-large", mix_large);
    emit("mix-small", mix_small);
    emit("basic-small", basic_small);
    return files;
}

}  // namespace omania
