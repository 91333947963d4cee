// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "offlinemania/dataset.hpp"
#include "offlinemania/env.hpp"
#include "offlinemania/harness.hpp"
#include "offlinemania/policy.hpp"
#include "offlinemania/reward.hpp"
#include "offlinemania/sensing.hpp"
#include "offlinemania/track.hpp"

using namespace omania;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<Action> random_actions(std::uint64_t seed, int n) {
    Rng rng(derive_seed(seed, 0xac7));
    std::vector<Action> out(n);
    for (Action& a : out) a = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    return out;
}

double circular_gap(double a, double b, double period) {
    const double d = std::fmod(std::abs(a - b), period);
    return std::min(d, period - d);
}

Outcome contract() {
    Env env(EnvConfig::canonical());
    auto pol = make_policy("random");
    Rng rng(1);
    long violations = 0;
    int steps = 0;
    std::uint64_t seed = 0;
    env.reset(seed);
    while (steps < 10000) {
        const Action a = pol->act(env.policy_input(), rng);
        const double act[] = {a.steer, a.throttle};
        if (std::size(act) != kActDim || std::abs(a.steer) > 1 || std::abs(a.throttle) > 1) ++violations;
        const StepResult r = env.step(a);
        if (r.observation.values.size() != kObsDim) ++violations;
        for (double v : r.observation.values)
            if (!std::isfinite(v)) ++violations;
        ++steps;
        if (r.truncated) env.reset(++seed);
    }
    Transition t;
    if (t.obs.size() != 33 || t.action.size() != 2 || kRecordBytes != 278) ++violations;
    return {violations == 0, fmt("%d steps, %ld violations", steps, violations)};
}

Outcome reward_cases() {
    const RewardConfig cfg{50.0};
    const double a = compute_reward(0.0, true, 2.0, cfg);
    const double b = compute_reward(0.0, false, 0.0, cfg);
    const double c = compute_reward(3.25, false, 0.0, cfg);
    // the same cases through the environment's progress bookkeeping
    const ProgressStep back = advance_progress(start_progress(10.0), 8.0, 236.0);
    const ProgressStep fwd = advance_progress(start_progress(10.0), 12.5, 236.0);
    const bool ok = a == -100.0 && b == 0.0 && c == 3.25 && back.delta == 0.0 && fwd.delta == 2.5;
    return {ok, fmt("contact |v|=2 -> %g, no advance -> %g, delta 3.25 -> %g", a, b, c)};
}

Outcome telescoping() {
    const EnvConfig cfg = EnvConfig::canonical();
    Env env(cfg);
    auto expert = make_policy("expert");
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const EpisodeSummary s = run_episode(*expert, env, seed);
        worst = std::max(worst, std::abs(s.positive_reward - (s.final_u_best - s.start_u)));
    }
    const double tol = 1e-6 * cfg.track->length();
    return {worst <= tol, fmt("max |sum(r+) - (u_best - u_start)| = %.3g m (tolerance %.3g)", worst, tol)};
}

Outcome determinism() {
    const EnvConfig cfg = EnvConfig::canonical();
    int mismatched = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto actions = random_actions(seed, cfg.episode_len);
        auto run = [&] {
            Env env(cfg);
            std::vector<StepResult> out;
            out.reserve(actions.size());
            env.reset(seed);
            for (const Action& a : actions) out.push_back(env.step(a));
            return out;
        };
        if (run() != run()) ++mismatched;
    }
    return {mismatched == 0, fmt("100 seeds, %d mismatched runs", mismatched)};
}

Outcome episode_structure() {
    Env env(EnvConfig::canonical());
    int bad = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        env.reset(seed);
        int steps = 0, truncations = 0, terminations = 0;
        for (const Action& a : random_actions(seed, 2000)) {
            const StepResult r = env.step(a);
            ++steps;
            truncations += r.truncated;
            terminations += r.terminated;
        }
        bool refused = false;
        try {
            env.step({});
        } catch (const std::exception&) {
            refused = true;
        }
        if (steps != 2000 || truncations != 1 || terminations != 0 || !refused) ++bad;
    }
    return {bad == 0, fmt("20 episodes of 2000 steps, %d malformed", bad)};
}

Outcome expert_calibration() {
    const EvalReport r = evaluate(*make_policy("expert"), EnvConfig::canonical(), 5, 0);
    const int min_laps = *std::min_element(r.laps.begin(), r.laps.end());
    const bool ok = r.mean_return >= 1065.0 && r.mean_return <= 1301.0 && min_laps >= 5 && r.median_lap_steps <= 420.0;
    return {ok, fmt("mean return %.1f in [1065, 1301], min laps %d >= 5, median lap %.1f <= 420 steps", r.mean_return,
                    min_laps, r.median_lap_steps)};
}

Outcome tier_ordering() {
    const EnvConfig cfg = EnvConfig::canonical();
    auto mean = [&](const char* name) { return evaluate(*make_policy(name), cfg, 20, 0).mean_return; };
    const double random = mean("random"), basic = mean("basic"), medium = mean("medium"), expert = mean("expert");
    const bool ok = random <= basic && basic < medium && medium < expert && basic < 0.0 && medium > 100.0 &&
                    medium < 700.0;
    return {ok, fmt("random %.1f <= basic %.1f < medium %.1f < expert %.1f", random, basic, medium, expert)};
}

std::vector<char> slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// file bytes with the header's created_at blanked out
std::vector<char> without_timestamp(const std::filesystem::path& p) {
    std::vector<char> bytes = slurp(p);
    if (bytes.size() < 8) return bytes;
    const auto* b = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::size_t hlen = b[4] | (b[5] << 8) | (b[6] << 16) | (std::size_t{b[7]} << 24);
    auto header = nlohmann::json::parse(std::string(bytes.data() + 8, hlen));
    header.erase("created_at");
    const std::string text = header.dump();
    std::vector<char> out(text.begin(), text.end());
    out.insert(out.end(), bytes.begin() + 8 + static_cast<std::ptrdiff_t>(hlen), bytes.end());
    return out;
}

Outcome dataset_suite() {
    const auto root = std::filesystem::temp_directory_path() / "omania-acceptance-suite";
    std::filesystem::remove_all(root);
    const EnvConfig cfg = EnvConfig::canonical();
    const auto first = generate_suite(cfg, root / "a", 0, "2026-01-01T00:00:00Z");
    const auto second = generate_suite(cfg, root / "b", 0, "2026-06-30T12:00:00Z");

    std::vector<std::uint64_t> counts;
    for (const SuiteFile& f : first) counts.push_back(read_dataset(f.path).records.size());
    const bool counts_ok = counts == std::vector<std::uint64_t>{100000, 100000, 100000, 200000, 5000, 5000} &&
                           first.size() == 6;

    auto provenance = [](const std::filesystem::path& p) {
        std::vector<std::uint64_t> c;
        for (const ProvenanceEntry& e : DatasetReader(p).header().provenance) c.push_back(e.count);
        return c;
    };
    const auto large = provenance(root / "a" / "mix-large.omd");
    const auto small = provenance(root / "a" / "mix-small.omd");
    const bool mix_ok = large == std::vector<std::uint64_t>{180000, 14000, 6000} &&
                        small == std::vector<std::uint64_t>{4500, 350, 150};

    int identical = 0;
    for (std::size_t i = 0; i < first.size() && i < second.size(); ++i)
        if (without_timestamp(first[i].path) == without_timestamp(second[i].path)) ++identical;
    std::filesystem::remove_all(root);
    return {counts_ok && mix_ok && identical == 6,
            fmt("counts %s, mix provenance %s, %d/6 files identical modulo created_at", counts_ok ? "ok" : "WRONG",
                mix_ok ? "ok" : "WRONG", identical)};
}

Outcome projection_oracle() {
    const Track& t = Track::bundled();
    const double L = t.length();
    std::vector<Vec2> samples;
    for (double s = 0.0; s < L; s += 0.01) samples.push_back(t.point_at(s));
    double lo_x = 1e9, lo_y = 1e9, hi_x = -1e9, hi_y = -1e9;
    for (Vec2 p : t.centerline()) {
        lo_x = std::min(lo_x, p.x), hi_x = std::max(hi_x, p.x);
        lo_y = std::min(lo_y, p.y), hi_y = std::max(hi_y, p.y);
    }
    Rng rng(2024);
    double worst = 0.0;
    int n = 0;
    while (n < 1000) {
        const Vec2 q{rng.uniform(lo_x - 6, hi_x + 6), rng.uniform(lo_y - 6, hi_y + 6)};
        double best = std::numeric_limits<double>::infinity();
        std::size_t arg = 0;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const double d = norm_sq(q - samples[k]);
            if (d < best) best = d, arg = k;
        }
        if (std::sqrt(best) > t.half_width()) continue;  // keep points on the track surface
        ++n;
        worst = std::max(worst, circular_gap(t.project(q).s, 0.01 * static_cast<double>(arg), L));
    }
    return {worst <= 0.01, fmt("1000 points, max arc-length gap %.4f m (tolerance 0.01)", worst)};
}

Outcome raycast_oracle() {
    const Track& t = Track::bundled();
    const RayConfig rays = RayConfig::standard(50.0);
    Rng rng(77);
    double worst = 0.0;
    int flag_mismatch = 0;
    for (int i = 0; i < 1000; ++i) {
        const double s = rng.uniform(0.0, t.length());
        VehicleState v;
        v.position = t.point_at(s) + left_normal(t.tangent_at(s)) * rng.uniform(-4.9, 4.9);
        v.heading = rng.uniform(-3.14159, 3.14159);
        const RayScan scan = cast_rays(v, t, rays);
        for (std::size_t k = 0; k < kNumRays; ++k) {
            const Vec2 d = unit_from_angle(v.heading - rays.offsets[k]);
            double best = std::numeric_limits<double>::infinity();
            for (const Segment& seg : t.wall_segments()) {
                const Vec2 e = seg.b - seg.a;
                const double den = d.x * e.y - d.y * e.x;
                if (den == 0.0) continue;
                const Vec2 w = seg.a - v.position;
                const double tt = (w.x * e.y - w.y * e.x) / den;
                const double u = (w.x * d.y - w.y * d.x) / den;
                if (tt >= 0.0 && u >= 0.0 && u <= 1.0) best = std::min(best, tt);
            }
            const bool hit = best <= 50.0;
            if (hit != scan[k].hit) ++flag_mismatch;
            worst = std::max(worst, std::abs(scan[k].distance - (hit ? best / 50.0 : 1.0)));
        }
    }
    return {flag_mismatch == 0 && worst <= 1e-6,
            fmt("15000 rays, %d hit-flag mismatches, max normalized gap %.3g (tolerance 1e-6)", flag_mismatch, worst)};
}

Outcome throughput() {
    const BenchReport r = run_bench(EnvConfig::canonical(), 16, 20000, 0);
    const bool single_ok = r.single_steps_per_sec >= 50000.0;
    std::string scaling;
    bool scaling_ok = true;
    if (r.hardware_threads >= 8) {
        scaling_ok = r.batched_steps_per_sec >= 4.0 * r.single_steps_per_sec;
        scaling = fmt("16-instance aggregate %.0f steps/s (%.2fx)", r.batched_steps_per_sec,
                      r.batched_steps_per_sec / r.single_steps_per_sec);
    } else {
        scaling = fmt("16-instance scaling clause SKIPPED: %u hardware thread(s), needs >= 8", r.hardware_threads);
    }
    return {single_ok && scaling_ok && r.batched_matches_sequential,
            fmt("single %.0f steps/s (floor 50000); batched %s sequential; ", r.single_steps_per_sec,
                r.batched_matches_sequential ? "==" : "!=") +
                scaling};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_s;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {1, "observation/action contract", 1, contract},
        {2, "reward cases", 1, reward_cases},
        {3, "progress telescoping", 5, telescoping},
        {4, "determinism", 30, determinism},
        {5, "episode structure", 5, episode_structure},
        {6, "expert calibration", 10, expert_calibration},
        {7, "tier ordering", 60, tier_ordering},
        {8, "dataset suite", 600, dataset_suite},
        {9, "projection oracle", 10, projection_oracle},
        {10, "raycast oracle", 10, raycast_oracle},
        {11, "throughput", 60, throughput},
    };
    int failures = 0;
    for (const Criterion& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = o.pass && in_time;
        failures += !pass;
        std::printf("[%s] %2d %-28s %s (%.2f s, budget %.0f s%s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                    o.detail.c_str(), secs, c.budget_s, in_time ? "" : ", OVER BUDGET");
        std::fflush(stdout);
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
