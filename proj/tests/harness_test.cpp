#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "offlinemania/errors.hpp"
#include "offlinemania/harness.hpp"
#include "support.hpp"

using namespace omania;
using omania::testing::TempDir;

namespace {

int run_cli(const std::string& args) {
    const std::string cmd = std::string(OMANIA_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string read_text(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Trajectory, SaveLoadAndVerify) {
    TempDir dir("traj");
    const EnvConfig cfg = EnvConfig::canonical();
    Env env(cfg);
    Trajectory t;
    run_episode(*make_policy("medium"), env, 5, &t);
    EXPECT_EQ(t.env_version, env_version(cfg));
    save_trajectory(dir / "t.json", t);
    const Trajectory back = load_trajectory(dir / "t.json");
    ASSERT_EQ(back.steps.size(), 2000u);
    EXPECT_EQ(back.seed, 5u);
    const ReplayCheck ok = verify_replay(back, cfg);
    EXPECT_TRUE(ok.ok) << ok.detail;
    EXPECT_EQ(ok.steps_checked, 2000u);

    Trajectory bad = back;
    bad.steps[700].reward += 1e-9;
    EXPECT_FALSE(verify_replay(bad, cfg).ok);
}

TEST(Trajectory, EmptyOrMalformedIsFormatError) {
    TempDir dir("empty");
    Trajectory t;
    t.env_version = "x";
    save_trajectory(dir / "empty.json", t);
    EXPECT_THROW(load_trajectory(dir / "empty.json"), FormatError);
    EXPECT_THROW(load_trajectory(dir / "nope.json"), IOError);
    std::ofstream(dir / "junk.json") << "[1, 2";
    EXPECT_THROW(load_trajectory(dir / "junk.json"), FormatError);
}

TEST(Episode, SummaryIsConsistent) {
    Env env(EnvConfig::canonical());
    Trajectory t;
    const EpisodeSummary s = run_episode(*make_policy("expert"), env, 1, &t);
    EXPECT_EQ(s.steps, 2000);
    double sum = 0.0, pos = 0.0;
    for (const TrajectoryStep& st : t.steps) {
        sum += st.reward;
        if (st.reward > 0) pos += st.reward;
    }
    EXPECT_DOUBLE_EQ(sum, s.total_return);
    EXPECT_DOUBLE_EQ(pos, s.positive_reward);
    EXPECT_EQ(static_cast<int>(s.lap_steps.size()), s.laps);
    EXPECT_NEAR(s.positive_reward, s.final_u_best - s.start_u, 1e-6 * env.track().length());
}

TEST(Evaluate, UsesConsecutiveSeeds) {
    const EvalReport r = evaluate(*make_policy("random"), EnvConfig::canonical(), 3, 10);
    EXPECT_EQ(r.seeds, (std::vector<std::uint64_t>{10, 11, 12}));
    Env env(EnvConfig::canonical());
    EXPECT_EQ(run_episode(*make_policy("random"), env, 11).total_return, r.returns[1]);
}

TEST(Render, SvgHasAllLayers) {
    const EnvConfig cfg = EnvConfig::canonical();
    Env env(cfg);
    Trajectory t;
    run_episode(*make_policy("basic"), env, 0, &t);
    const std::string svg = render_svg(*cfg.track, t, cfg.physics.v_max);
    EXPECT_EQ(svg.rfind("<svg", 0), 0u);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
    EXPECT_NE(svg.find("<polygon"), std::string::npos);
    EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
    EXPECT_NE(svg.find("<circle"), std::string::npos);
}

TEST(Bench, ZeroStepsIsEmpty) {
    const BenchReport r = run_bench(EnvConfig::canonical(), 4, 0, 0);
    EXPECT_EQ(r.single_steps_per_sec, 0.0);
    EXPECT_EQ(r.batched_steps_per_sec, 0.0);
    EXPECT_TRUE(r.batched_matches_sequential);
}

TEST(Suite, Recipes) {
    const auto recipes = suite_recipes();
    ASSERT_EQ(recipes.size(), 6u);
    std::vector<std::uint64_t> totals;
    for (const auto& r : recipes) totals.push_back(r.total);
    EXPECT_EQ(totals, (std::vector<std::uint64_t>{100000, 100000, 100000, 200000, 5000, 5000}));
    EXPECT_EQ(recipes[3].ratios, (std::vector<double>{0.90, 0.07, 0.03}));
}

TEST(Cli, ExitCodes) {
    TempDir dir("cli");
    EXPECT_EQ(run_cli("--help"), 0);
    EXPECT_EQ(run_cli("evaluate --policy nobody --episodes 1"), 1);
    EXPECT_EQ(run_cli("bench --envs 1 --steps 0"), 0);

    const std::string traj = (dir / "r.json").string();
    EXPECT_EQ(run_cli("rollout --policy medium --seed 2 --out " + traj), 0);
    EXPECT_EQ(run_cli("verify-replay " + traj), 0);
    EXPECT_EQ(run_cli("render-replay " + traj + " --out " + (dir / "r.svg").string()), 0);
    EXPECT_EQ(read_text(dir / "r.svg").rfind("<svg", 0), 0u);

    auto doc = nlohmann::json::parse(read_text(traj));
    doc["steps"][10]["reward"] = 12345.0;
    std::ofstream(dir / "tampered.json") << doc.dump();
    EXPECT_EQ(run_cli("verify-replay " + (dir / "tampered.json").string()), 3);

    Trajectory empty;
    save_trajectory(dir / "empty.json", empty);
    EXPECT_EQ(run_cli("render-replay " + (dir / "empty.json").string() + " --out " + (dir / "e.svg").string()), 2);

    // corridor pinches where the two long sides run 3 m apart
    nlohmann::json pinched = {{"version", "1"},
                              {"name", "pinched"},
                              {"half_width", 6.0},
                              {"centerline", {{0, 0}, {40, 0}, {40, 3}, {0, 3}}},
                              {"start_area", {{"center", {20, 0}}, {"size_m", 1.0}}}};
    std::ofstream(dir / "pinched.json") << pinched.dump();
    EXPECT_EQ(run_cli("validate-track " + (dir / "pinched.json").string()), 3);
    EXPECT_EQ(run_cli("validate-track " + std::string(OMANIA_TRACK)), 0);

    const std::string a = (dir / "a.omd").string(), b = (dir / "b.omd").string(), m = (dir / "m.omd").string();
    EXPECT_EQ(run_cli("gen-dataset --policy random -n 300 --seed 1 --out " + a), 0);
    EXPECT_EQ(run_cli("gen-dataset --policy basic -n 300 --seed 1 --out " + b), 0);
    EXPECT_EQ(run_cli("mix-dataset --input " + a + " --input " + b + " --ratio 0.5 --ratio 0.5 --total 200 --out " + m), 0);
    EXPECT_EQ(run_cli("inspect-dataset " + m), 0);
    EXPECT_EQ(run_cli("mix-dataset --input " + a + " --ratio 1.0 --total 301 --out " + m), 2);
    EXPECT_EQ(run_cli("inspect-dataset " + traj), 2);
}
