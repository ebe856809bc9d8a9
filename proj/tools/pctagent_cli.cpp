// pctagent: run perceptual-control agents against the built-in simulator or a
// remote environment and write score reports.
//
//   pctagent run --config run.ini [--episodes N] [--seed S] [--policy pct|random]
//                [--env sim_breakout|sim_pong|remote] [--listen host:port|stdio]
//                [--out DIR] [--dump-frames DIR] [--jobs N]

#include <iostream>

#include <CLI11.hpp>

#include "pctagent/config.hpp"
#include "pctagent/harness.hpp"

namespace {

constexpr int kExitAborted = 2;
constexpr int kExitConfig = 3;

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Perceptual control agent for paddle games"};
    app.require_subcommand(1);

    CLI::App* run = app.add_subcommand("run", "Run a batch of episodes and write reports");
    std::string config_path;
    std::optional<int> episodes;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> policy;
    std::optional<std::string> env;
    std::optional<std::string> listen;
    std::optional<std::string> out;
    std::optional<std::string> dump_frames;
    std::optional<int> jobs;
    bool quiet = false;
    run->add_option("--config", config_path, "Config file (INI)");
    run->add_option("--episodes", episodes, "Number of episodes");
    run->add_option("--seed", seed, "Base seed");
    run->add_option("--policy", policy, "pct or random")->check(CLI::IsMember({"pct", "random"}));
    run->add_option("--env", env, "sim_breakout, sim_pong or remote")
        ->check(CLI::IsMember({"sim_breakout", "sim_pong", "remote"}));
    run->add_option("--listen", listen, "host:port to accept a remote environment on, or 'stdio'");
    run->add_option("--out", out, "Output directory for episodes.csv, histogram.csv, summary.json");
    run->add_option("--dump-frames", dump_frames, "Write every rendered frame as PGM into this directory");
    run->add_option("--jobs", jobs, "Parallel simulator workers");
    run->add_flag("-q,--quiet", quiet, "Do not print the text histogram");

    CLI11_PARSE(app, argc, argv);

    pct::RunConfig cfg;
    try {
        pct::IniDocument doc;
        if (!config_path.empty()) doc = pct::IniDocument::load(config_path);
        pct::CliOverrides cli;
        cli.episodes = episodes;
        cli.seed = seed;
        if (policy) cli.policy = pct::parse_policy(*policy);
        if (env) cli.environment = pct::parse_env(*env);
        cli.listen = listen;
        cli.out_dir = out;
        cli.dump_frames = dump_frames;
        cli.jobs = jobs;
        cfg = pct::build_run_config(doc, cli);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (!cfg.deterministic) {
        std::random_device rd;
        cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
        cfg.sim.seed = cfg.seed;
    }

    pct::BatchReport report;
    try {
        report = pct::run_batch(cfg);
        pct::write_reports(cfg, report);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    // Interactive output goes to stderr: stdout may carry the wire protocol.
    std::ostream& console = cfg.listen == "stdio" ? std::cerr : std::cout;
    const auto& s = report.score;
    console << to_string(cfg.environment) << " policy=" << to_string(cfg.policy) << " frameskip=" << cfg.frameskip()
            << " episodes=" << s.count << " aborted=" << report.aborted << '\n'
            << "score mean=" << s.mean << " median=" << s.median << " best=" << s.best << " worst=" << s.worst
            << " std=" << s.std_dev << '\n';
    if (!quiet) console << pct::render_histogram(report.histogram);

    if (report.too_many_aborted()) {
        std::cerr << "error: " << report.aborted << " of " << report.episodes.size() << " episodes aborted\n";
        return kExitAborted;
    }
    return 0;
}
