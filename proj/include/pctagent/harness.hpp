#pragma once

#include <cstdint>
#include <memory>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "pctagent/config.hpp"
#include "pctagent/paddle_sim.hpp"
#include "pctagent/pct_core.hpp"
#include "pctagent/perception.hpp"
#include "pctagent/stats.hpp"
#include "pctagent/wire.hpp"

namespace pct {

// The remote peer went away or broke the protocol mid-episode.
class EnvironmentLost : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Observation {
    RawFrame frame;
    double reward = 0.0;
    bool terminal = false;
};

class Environment {
public:
    virtual ~Environment() = default;
    virtual Observation reset() = 0;
    virtual Observation step(Action action) = 0;
    // Called once after a terminal observation.
    virtual void finish() {}
    // Environments that keep running after the step cap until they report a
    // terminal observation themselves.
    [[nodiscard]] virtual bool drains_after_cap() const { return false; }
    [[nodiscard]] virtual double score() const = 0;
    [[nodiscard]] virtual int penalties() const = 0;
};

class SimEnvironment : public Environment {
public:
    // Frames are written to dump_dir as ep<episode>_<step>.pgm when non-empty.
    SimEnvironment(SimConfig cfg, std::string dump_dir = {}, int episode = 0);

    Observation reset() override;
    Observation step(Action action) override;
    [[nodiscard]] double score() const override { return state_.score; }
    [[nodiscard]] int penalties() const override { return penalties_; }

    [[nodiscard]] const SimState& state() const { return state_; }
    [[nodiscard]] SimState& mutable_state() { return state_; }
    [[nodiscard]] const SimConfig& config() const { return cfg_; }

private:
    Observation observe(double reward, bool terminal);

    SimConfig cfg_;
    SimState state_;
    std::string dump_dir_;
    int episode_;
    int frame_no_ = 0;
    int penalties_ = 0;
};

// Plays against whatever sits on the other end of a wire stream. Every frame,
// terminal ones included, is answered with exactly one action byte. The score
// is the point margin for pong and the sum of positive rewards for breakout,
// matching the simulator.
class RemoteEnvironment : public Environment {
public:
    RemoteEnvironment(wire::Stream& stream, Game game) : stream_(stream), game_(game) {}

    Observation reset() override;
    Observation step(Action action) override;
    void finish() override;
    [[nodiscard]] bool drains_after_cap() const override { return true; }
    [[nodiscard]] double score() const override { return game_ == Game::pong ? total_ : gained_; }
    [[nodiscard]] int penalties() const override { return penalties_; }

private:
    Observation receive();

    wire::Stream& stream_;
    Game game_;
    double total_ = 0.0;
    double gained_ = 0.0;
    int penalties_ = 0;
};

class Policy {
public:
    virtual ~Policy() = default;
    virtual void reset() = 0;
    virtual Action act(const RawFrame& frame) = 0;
};

class PctPolicy : public Policy {
public:
    PctPolicy(const HierarchySpec& spec, const CropConfig& crop, const GameLayout& layout);

    void reset() override;
    Action act(const RawFrame& frame) override;

    [[nodiscard]] const Perceiver& perceiver() const { return perceiver_; }
    [[nodiscard]] const Controller& controller() const { return controller_; }

private:
    Perceiver perceiver_;
    Controller controller_;
};

class RandomPolicy : public Policy {
public:
    explicit RandomPolicy(std::uint64_t seed) : seed_(seed), rng_(seed) {}

    void reset() override { rng_.seed(seed_); }
    Action act(const RawFrame&) override { return static_cast<Action>(rng_() % 4); }

private:
    std::uint64_t seed_;
    std::mt19937_64 rng_;
};

enum class Termination : std::uint8_t { terminal, step_cap, aborted };

const char* to_string(Termination t);

struct EpisodeResult {
    int index = 0;
    double score = 0.0;
    double total_reward = 0.0;
    int steps = 0;
    int penalties = 0;  // lives lost (breakout) or points against (pong)
    Termination termination = Termination::terminal;
};

struct EpisodeOptions {
    int max_steps = 20000;
    std::ostream* trace = nullptr;  // one CSV line per step when set
};

// Never throws EnvironmentLost; a lost peer yields Termination::aborted.
EpisodeResult run_episode(Environment& env, Policy& policy, int index, const EpisodeOptions& opts);

struct BatchReport {
    std::vector<EpisodeResult> episodes;  // ordered by index, aborted ones included
    int aborted = 0;
    Summary score;
    Summary total_reward;
    std::vector<HistogramBin> histogram;

    [[nodiscard]] bool too_many_aborted() const { return aborted * 10 > static_cast<int>(episodes.size()); }
};

// Episode i plays with seed derive_seed(base, i).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

std::unique_ptr<Policy> make_policy(const RunConfig& cfg, int episode);

// Runs cfg.episodes simulator episodes on cfg.jobs worker threads.
BatchReport run_sim_batch(const RunConfig& cfg);

// Runs cfg.episodes consecutive episodes over one stream. Episodes that cannot
// complete because the peer went away are reported as aborted.
BatchReport run_remote_batch(const RunConfig& cfg, wire::Stream& stream);

// Accepts the connection named by cfg.listen (or stdio) and runs the batch.
BatchReport run_batch(const RunConfig& cfg);

// Recomputes summary and histogram over the non-aborted episodes.
void finalize(BatchReport& report, double histogram_bin);

std::string episodes_csv(const BatchReport& report);
std::string histogram_csv(const BatchReport& report);
std::string summary_json(const RunConfig& cfg, const BatchReport& report);

// Writes episodes.csv, histogram.csv and summary.json into cfg.out_dir.
void write_reports(const RunConfig& cfg, const BatchReport& report);

}  // namespace pct
