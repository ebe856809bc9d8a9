#include <doctest.h>

#include <sys/socket.h>
#include <sys/wait.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pctagent/harness.hpp"
#include "pctagent/transport.hpp"
#include "support/fake_bridge.hpp"
#include "support/reach_bound.hpp"

using namespace pct;
namespace fs = std::filesystem;

namespace {

RunConfig sim_config(EnvKind env, int episodes, std::uint64_t seed = 1) {
    CliOverrides cli;
    cli.environment = env;
    cli.episodes = episodes;
    cli.seed = seed;
    return build_run_config(IniDocument{}, cli);
}

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("pctagent_test_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct SocketPair {
    std::unique_ptr<wire::FdStream> harness;
    std::unique_ptr<wire::FdStream> bridge;
    SocketPair() {
        int fds[2];
        REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
        harness = std::make_unique<wire::FdStream>(fds[0], fds[0], true);
        bridge = std::make_unique<wire::FdStream>(fds[1], fds[1], true);
    }
};

// Runs a remote batch against the simulator served over a socketpair.
BatchReport remote_batch(const RunConfig& remote, const SimConfig& sim, testing::BridgeOptions opts) {
    SocketPair sp;
    std::thread bridge([&] {
        testing::serve_sim(*sp.bridge, sim, opts);
        sp.bridge.reset();
    });
    BatchReport r = run_remote_batch(remote, *sp.harness);
    bridge.join();
    return r;
}

RunConfig remote_config(Game game, int episodes, int max_steps = 20000) {
    RunConfig c = sim_config(game == Game::breakout ? EnvKind::sim_breakout : EnvKind::sim_pong, episodes);
    c.environment = EnvKind::remote;
    c.listen = "unused";
    c.max_steps = max_steps;
    return c;
}

int run_cli(const std::string& args) {
    const int status = std::system((std::string(PCTAGENT_CLI) + " " + args + " >/dev/null 2>&1").c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("max_steps = 0 ends immediately at the step cap with score 0") {
    RunConfig c = sim_config(EnvKind::sim_breakout, 2);
    c.max_steps = 0;
    const BatchReport r = run_sim_batch(c);
    REQUIRE(r.episodes.size() == 2);
    for (const auto& e : r.episodes) {
        CHECK(e.termination == Termination::step_cap);
        CHECK(e.score == 0.0);
        CHECK(e.steps == 0);
    }
}

TEST_CASE("a single episode has mean = best = worst") {
    RunConfig c = sim_config(EnvKind::sim_breakout, 1);
    c.max_steps = 300;
    const BatchReport r = run_sim_batch(c);
    CHECK(r.score.count == 1);
    CHECK(r.score.mean == r.score.best);
    CHECK(r.score.mean == r.score.worst);
    CHECK(r.episodes[0].steps <= 300);
}

TEST_CASE("reports are byte-identical across runs and worker counts") {
    RunConfig c = sim_config(EnvKind::sim_breakout, 6, 42);
    c.max_steps = 1500;
    const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
    c.out_dir = a.string();
    write_reports(c, run_sim_batch(c));
    c.out_dir = b.string();
    c.jobs = 3;
    const BatchReport parallel = run_sim_batch(c);
    c.jobs = 1;  // jobs is not part of the report
    write_reports(c, parallel);
    for (const char* f : {"summary.json", "episodes.csv", "histogram.csv"}) {
        CHECK(slurp(a / f) == slurp(b / f));
    }
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST_CASE("summary statistics match a recomputation from episodes.csv") {
    RunConfig c = sim_config(EnvKind::sim_pong, 5, 7);
    c.policy = PolicyKind::random;
    const fs::path dir = scratch_dir("stats");
    c.out_dir = dir.string();
    const BatchReport r = run_sim_batch(c);
    write_reports(c, r);

    std::ifstream csv(dir / "episodes.csv");
    std::string line;
    std::getline(csv, line);
    CHECK(line == "episode,score,total_reward,steps,penalties,termination");
    std::vector<double> scores;
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string field;
        std::getline(row, field, ',');
        std::getline(row, field, ',');
        scores.push_back(std::stod(field));
    }
    REQUIRE(scores.size() == 5);
    double sum = 0.0;
    for (double s : scores) sum += s;
    const double mean = sum / 5.0;
    double ss = 0.0;
    for (double s : scores) ss += (s - mean) * (s - mean);
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());

    const auto j = nlohmann::json::parse(slurp(dir / "summary.json"));
    CHECK(j["score"]["mean"].get<double>() == doctest::Approx(mean));
    CHECK(j["score"]["median"].get<double>() == sorted[2]);
    CHECK(j["score"]["best"].get<double>() == sorted.back());
    CHECK(j["score"]["worst"].get<double>() == sorted.front());
    CHECK(j["score"]["std"].get<double>() == doctest::Approx(std::sqrt(ss / 5.0)));
    CHECK(j["episodes"]["requested"] == 5);
    CHECK(j["episodes"]["aborted"] == 0);
    CHECK(j["mode"]["frameskip"] == 4);
    CHECK(j["policy"] == "random");
    CHECK(j["environment"] == "sim_pong");
    std::size_t binned = 0;
    for (const auto& b : j["histogram"]) binned += b["count"].get<std::size_t>();
    CHECK(binned == 5);
    fs::remove_all(dir);
}

TEST_CASE("episode scores equal the reward sum minus penalties in the simulator") {
    RunConfig c = sim_config(EnvKind::sim_breakout, 4, 3);
    c.policy = PolicyKind::random;
    for (const auto& e : run_sim_batch(c).episodes) {
        CHECK(e.termination == Termination::terminal);
        CHECK(e.total_reward == e.score - e.penalties);
        CHECK(e.penalties == 5);
    }
}

TEST_CASE("remote play over the wire reproduces the simulator batch") {
    const RunConfig remote = remote_config(Game::breakout, 2);
    RunConfig local = sim_config(EnvKind::sim_breakout, 2);
    const BatchReport direct = run_sim_batch(local);
    const BatchReport wired = remote_batch(remote, local.sim, {2, local.seed});
    REQUIRE(wired.episodes.size() == 2);
    for (int i = 0; i < 2; ++i) {
        CHECK(wired.episodes[i].termination == Termination::terminal);
        CHECK(wired.episodes[i].score == direct.episodes[i].score);
        CHECK(wired.episodes[i].steps == direct.episodes[i].steps);
        CHECK(wired.episodes[i].total_reward == direct.episodes[i].total_reward);
        CHECK(wired.episodes[i].penalties == direct.episodes[i].penalties);
    }
    CHECK(wired.aborted == 0);
}

TEST_CASE("remote step cap freezes the result while the environment plays out") {
    RunConfig remote = remote_config(Game::pong, 2, 50);
    remote.policy = PolicyKind::random;
    const SimConfig sim = SimConfig::pong_defaults();
    const BatchReport r = remote_batch(remote, sim, {2, remote.seed});
    REQUIRE(r.episodes.size() == 2);
    for (const auto& e : r.episodes) {
        CHECK(e.termination == Termination::step_cap);
        CHECK(e.steps == 50);
    }
}

TEST_CASE("remote disconnect aborts the current and remaining episodes") {
    RunConfig remote = remote_config(Game::breakout, 4);
    remote.policy = PolicyKind::random;
    const SimConfig sim = SimConfig::breakout_defaults();
    testing::BridgeOptions opts{4, remote.seed};
    opts.close_after_frames = 30;
    const BatchReport r = remote_batch(remote, sim, opts);
    REQUIRE(r.episodes.size() == 4);
    CHECK(r.aborted >= 3);
    CHECK(r.episodes.back().termination == Termination::aborted);
    CHECK(r.too_many_aborted());

    opts.corrupt_last = true;
    const BatchReport bad = remote_batch(remote, sim, opts);
    CHECK(bad.episodes.back().termination == Termination::aborted);
}

TEST_CASE("aborted episodes are excluded from the statistics") {
    BatchReport r;
    for (int i = 0; i < 20; ++i) r.episodes.push_back({i, static_cast<double>(i), 0.0, 10, 0, Termination::terminal});
    r.episodes[3].termination = Termination::aborted;
    r.episodes[3].score = 1000.0;
    r.episodes[7].termination = Termination::aborted;
    finalize(r, 5.0);
    CHECK(r.aborted == 2);
    CHECK(r.score.count == 18);
    CHECK(r.score.best == 19.0);
    CHECK_FALSE(r.too_many_aborted());
    r.episodes[9].termination = Termination::aborted;
    finalize(r, 5.0);
    CHECK(r.too_many_aborted());
}

TEST_CASE("frame dumps and traces") {
    RunConfig c = sim_config(EnvKind::sim_breakout, 1);
    c.max_steps = 5;
    const fs::path dir = scratch_dir("dump");
    c.dump_frames = (dir / "frames").string();
    c.trace_path = (dir / "trace.csv").string();
    run_sim_batch(c);
    const std::string pgm = slurp(dir / "frames" / "ep0000_000000.pgm");
    CHECK(pgm.rfind("P5\n160 210\n255\n", 0) == 0);
    CHECK(pgm.size() == 15 + 160 * 210);
    std::ifstream trace(c.trace_path);
    std::string line;
    int lines = 0;
    while (std::getline(trace, line)) ++lines;
    CHECK(lines == 6);
    fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
    const fs::path dir = scratch_dir("cli");
    CHECK(run_cli("run --episodes 2 --policy random --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "summary.json"));
    CHECK(fs::exists(dir / "histogram.csv"));
    CHECK(run_cli("run --episodes 0") == 3);
    CHECK(run_cli("run --config " + (dir / "missing.ini").string()) == 3);
    // A peer that never sends a frame aborts every episode.
    CHECK(run_cli("run --env remote --listen stdio --episodes 3 --out " + dir.string() + " </dev/null") == 2);
    fs::remove_all(dir);
}

TEST_CASE("stationary-ball bound derived from the default paddle physics") {
    const SimConfig cfg;
    CHECK(oracle::saturated_reach_steps(cfg, 3, 108.0) == 23);
    CHECK(oracle::stationary_ball_bound(cfg, 3) == 32);

    // Far-corner starts, both directions.
    const RunConfig rc = build_run_config(IniDocument{});
    for (const auto& [start, target] : {std::pair{21.5, 137.0}, std::pair{137.5, 22.0}, std::pair{79.5, 79.5}}) {
        SimEnvironment env(rc.sim);
        env.reset();
        SimState& s = env.mutable_state();
        s.ball_in_play = true;
        s.ball_x = target;
        s.ball_y = 140.0;
        s.paddle_pos = start;
        PctPolicy policy(rc.pct, rc.crop, rc.layout);
        RawFrame frame = render(s, rc.sim);
        int entry = std::abs(start - target) <= 8.0 ? 0 : -1;
        for (int step = 1; step <= 32 && entry < 0; ++step) {
            frame = env.step(policy.act(frame)).frame;
            if (std::abs(env.state().paddle_pos - target) <= 8.0) entry = step;
        }
        CHECK(entry >= 0);
    }
}
