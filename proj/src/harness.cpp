#include "pctagent/harness.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "pctagent/transport.hpp"

namespace pct {

const char* to_string(Termination t) {
    switch (t) {
        case Termination::terminal: return "terminal";
        case Termination::step_cap: return "step_cap";
        case Termination::aborted: return "aborted";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// Environments

SimEnvironment::SimEnvironment(SimConfig cfg, std::string dump_dir, int episode)
    : cfg_(std::move(cfg)), dump_dir_(std::move(dump_dir)), episode_(episode) {
    cfg_.validate();
    if (!dump_dir_.empty()) std::filesystem::create_directories(dump_dir_);
}

Observation SimEnvironment::observe(double reward, bool terminal) {
    Observation obs{render(state_, cfg_), reward, terminal};
    if (!dump_dir_.empty()) {
        char name[64];
        std::snprintf(name, sizeof name, "ep%04d_%06d.pgm", episode_, frame_no_);
        write_pgm((std::filesystem::path(dump_dir_) / name).string(), obs.frame);
    }
    ++frame_no_;
    return obs;
}

Observation SimEnvironment::reset() {
    state_ = pct::reset(cfg_);
    frame_no_ = 0;
    penalties_ = 0;
    return observe(0.0, false);
}

Observation SimEnvironment::step(Action action) {
    const StepOutcome out = sim_step(state_, action, cfg_);
    for (SimEvent e : out.events) {
        if (e == SimEvent::life_lost || e == SimEvent::point_against) ++penalties_;
    }
    return observe(out.reward, out.terminal);
}

Observation RemoteEnvironment::receive() {
    std::optional<wire::FrameMessage> msg;
    try {
        msg = wire::read_frame(stream_);
    } catch (const wire::FramingError& e) {
        throw EnvironmentLost(std::string("protocol violation: ") + e.what());
    } catch (const std::runtime_error& e) {
        throw EnvironmentLost(e.what());
    }
    if (!msg) throw EnvironmentLost("peer closed the connection");
    Observation obs{std::move(msg->frame), msg->reward(), msg->terminal};
    total_ += obs.reward;
    if (obs.reward > 0.0) gained_ += obs.reward;
    if (obs.reward < 0.0) ++penalties_;
    return obs;
}

Observation RemoteEnvironment::reset() {
    total_ = 0.0;
    gained_ = 0.0;
    penalties_ = 0;
    return receive();
}

Observation RemoteEnvironment::step(Action action) {
    try {
        wire::write_action(stream_, action);
    } catch (const std::runtime_error& e) {
        throw EnvironmentLost(e.what());
    }
    return receive();
}

void RemoteEnvironment::finish() {
    try {
        wire::write_action(stream_, Action::noop);
    } catch (const std::runtime_error& e) {
        throw EnvironmentLost(e.what());
    }
}

// ---------------------------------------------------------------------------
// Policies

PctPolicy::PctPolicy(const HierarchySpec& spec, const CropConfig& crop, const GameLayout& layout)
    : perceiver_(crop, layout), controller_(spec) {}

void PctPolicy::reset() {
    perceiver_.reset();
    controller_.reset();
}

Action PctPolicy::act(const RawFrame& frame) { return controller_.act(perceiver_.observe(frame)); }

// ---------------------------------------------------------------------------
// Episodes

namespace {

void trace_step(std::ostream& out, int index, int step, Action a, double reward, const Policy& policy) {
    out << index << ',' << step << ',' << to_string(a) << ',' << reward;
    if (const auto* p = dynamic_cast<const PctPolicy*>(&policy)) {
        const PerceptState& s = p->perceiver().state();
        const auto& u = p->controller().state().units;
        out << ',' << s.ball_x << ',' << s.ball_y << ',' << s.ball_valid << ',' << s.paddle_axis << ','
            << s.paddle_direction;
        for (const auto& unit : u) out << ',' << unit.last_error;
    }
    out << '\n';
}

}  // namespace

EpisodeResult run_episode(Environment& env, Policy& policy, int index, const EpisodeOptions& opts) {
    EpisodeResult r;
    r.index = index;
    policy.reset();
    try {
        Observation obs = env.reset();
        bool capped = false;
        while (!obs.terminal) {
            if (!capped && r.steps >= opts.max_steps) {
                capped = true;
                r.termination = Termination::step_cap;
                r.score = env.score();
                r.penalties = env.penalties();
                if (!env.drains_after_cap()) return r;
            }
            const Action a = policy.act(obs.frame);
            obs = env.step(a);
            if (!capped) {
                ++r.steps;
                r.total_reward += obs.reward;
                if (opts.trace) trace_step(*opts.trace, index, r.steps, a, obs.reward, policy);
            }
        }
        env.finish();
        if (!capped) {
            r.termination = Termination::terminal;
            r.score = env.score();
            r.penalties = env.penalties();
        }
    } catch (const EnvironmentLost&) {
        r.termination = Termination::aborted;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Batches

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
    // splitmix64 finaliser over base + golden-ratio stride
    std::uint64_t z = base + (index + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::unique_ptr<Policy> make_policy(const RunConfig& cfg, int episode) {
    if (cfg.policy == PolicyKind::random) {
        return std::make_unique<RandomPolicy>(derive_seed(cfg.seed ^ 0x52414E444F4DULL, static_cast<std::uint64_t>(episode)));
    }
    return std::make_unique<PctPolicy>(cfg.pct, cfg.crop, cfg.layout);
}

void finalize(BatchReport& report, double histogram_bin) {
    std::vector<double> scores;
    std::vector<double> rewards;
    report.aborted = 0;
    for (const auto& e : report.episodes) {
        if (e.termination == Termination::aborted) {
            ++report.aborted;
            continue;
        }
        scores.push_back(e.score);
        rewards.push_back(e.total_reward);
    }
    if (scores.empty()) {
        report.score = {};
        report.total_reward = {};
        report.histogram.clear();
        return;
    }
    report.score = summarize(scores);
    report.total_reward = summarize(rewards);
    report.histogram = histogram(scores, histogram_bin);
}

BatchReport run_sim_batch(const RunConfig& cfg) {
    BatchReport report;
    report.episodes.resize(static_cast<std::size_t>(cfg.episodes));

    std::ofstream trace_file;
    std::mutex trace_mutex;
    if (!cfg.trace_path.empty()) {
        trace_file.open(cfg.trace_path);
        if (!trace_file) throw std::runtime_error("cannot open trace file " + cfg.trace_path);
        trace_file << "episode,step,action,reward,ball_x,ball_y,ball_valid,paddle,direction,e1,e2,e3,e4\n";
    }

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next++; i < cfg.episodes; i = next++) {
            SimConfig sc = cfg.sim;
            sc.seed = derive_seed(cfg.seed, static_cast<std::uint64_t>(i));
            SimEnvironment env(sc, cfg.dump_frames, i);
            auto policy = make_policy(cfg, i);
            std::ostringstream trace;
            EpisodeOptions opts{cfg.max_steps, trace_file.is_open() ? &trace : nullptr};
            report.episodes[static_cast<std::size_t>(i)] = run_episode(env, *policy, i, opts);
            if (trace_file.is_open()) {
                std::lock_guard lock(trace_mutex);
                trace_file << trace.str();
            }
        }
    };
    const int workers = std::min(cfg.jobs, cfg.episodes);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    finalize(report, cfg.histogram_bin);
    return report;
}

BatchReport run_remote_batch(const RunConfig& cfg, wire::Stream& stream) {
    BatchReport report;
    RemoteEnvironment env(stream, cfg.game);
    bool lost = false;
    for (int i = 0; i < cfg.episodes; ++i) {
        if (lost) {
            report.episodes.push_back({i, 0.0, 0.0, 0, 0, Termination::aborted});
            continue;
        }
        auto policy = make_policy(cfg, i);
        EpisodeResult r = run_episode(env, *policy, i, {cfg.max_steps, nullptr});
        if (r.termination == Termination::aborted) {
            lost = true;
            std::cerr << "warning: episode " << i << " aborted, remote environment lost\n";
        }
        report.episodes.push_back(r);
    }
    finalize(report, cfg.histogram_bin);
    return report;
}

BatchReport run_batch(const RunConfig& cfg) {
    if (cfg.environment != EnvKind::remote) return run_sim_batch(cfg);
    if (cfg.listen == "stdio") {
        auto stream = wire::stdio_stream();
        return run_remote_batch(cfg, *stream);
    }
    wire::TcpListener listener(wire::Endpoint::parse(cfg.listen));
    std::cerr << "listening on port " << listener.port() << '\n';
    auto stream = listener.accept();
    return run_remote_batch(cfg, *stream);
}

// ---------------------------------------------------------------------------
// Reports

std::string episodes_csv(const BatchReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "episode,score,total_reward,steps,penalties,termination\n";
    for (const auto& e : report.episodes) {
        out << e.index << ',' << e.score << ',' << e.total_reward << ',' << e.steps << ',' << e.penalties << ','
            << to_string(e.termination) << '\n';
    }
    return out.str();
}

std::string histogram_csv(const BatchReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "bin_lower,bin_upper,count\n";
    for (const auto& b : report.histogram) out << b.lower << ',' << b.upper << ',' << b.count << '\n';
    return out.str();
}

namespace {

nlohmann::ordered_json summary_object(const Summary& s) {
    return {{"count", s.count}, {"mean", s.mean},   {"median", s.median},
            {"best", s.best},   {"worst", s.worst}, {"std", s.std_dev}};
}

}  // namespace

std::string summary_json(const RunConfig& cfg, const BatchReport& report) {
    nlohmann::ordered_json j;
    j["environment"] = to_string(cfg.environment);
    j["game"] = to_string(cfg.game);
    j["policy"] = to_string(cfg.policy);
    j["mode"] = {{"frameskip", cfg.frameskip()},
                 {"noframeskip", cfg.frameskip() == 1},
                 {"deterministic", cfg.deterministic}};
    j["seed"] = cfg.seed;
    j["episodes"] = {{"requested", cfg.episodes},
                     {"completed", static_cast<int>(report.episodes.size()) - report.aborted},
                     {"aborted", report.aborted}};
    j["max_steps"] = cfg.max_steps;
    int capped = 0;
    for (const auto& e : report.episodes) capped += e.termination == Termination::step_cap ? 1 : 0;
    j["step_capped"] = capped;
    j["score"] = summary_object(report.score);
    j["total_reward"] = summary_object(report.total_reward);
    j["histogram_bin"] = cfg.histogram_bin;
    nlohmann::ordered_json bins = nlohmann::ordered_json::array();
    for (const auto& b : report.histogram) bins.push_back({{"lower", b.lower}, {"upper", b.upper}, {"count", b.count}});
    j["histogram"] = bins;
    return j.dump(2) + "\n";
}

void write_reports(const RunConfig& cfg, const BatchReport& report) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& text) {
        std::ofstream out(dir / name, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + (dir / name).string());
        out << text;
    };
    write("episodes.csv", episodes_csv(report));
    write("histogram.csv", histogram_csv(report));
    write("summary.json", summary_json(cfg, report));
}

}  // namespace pct
