#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <string>

#include "pctagent/paddle_sim.hpp"
#include "pctagent/pct_core.hpp"
#include "pctagent/perception.hpp"

namespace pct {

// Minimal INI document: `[section]` headers, `key = value` lines, `#` or `;`
// comments. Keys outside any section are rejected.
class IniDocument {
public:
    static IniDocument parse(std::istream& in);
    static IniDocument load(const std::string& path);

    [[nodiscard]] const std::map<std::string, std::map<std::string, std::string>>& sections() const {
        return sections_;
    }
    [[nodiscard]] std::optional<std::string> get(const std::string& section, const std::string& key) const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

enum class EnvKind : std::uint8_t { sim_breakout, sim_pong, remote };
enum class PolicyKind : std::uint8_t { pct, random };

const char* to_string(EnvKind e);
const char* to_string(PolicyKind p);
EnvKind parse_env(const std::string& s);
PolicyKind parse_policy(const std::string& s);

struct RunConfig {
    EnvKind environment = EnvKind::sim_breakout;
    Game game = Game::breakout;  // which preset a remote environment plays
    int episodes = 500;
    int max_steps = 20000;
    PolicyKind policy = PolicyKind::pct;
    bool deterministic = true;
    std::uint64_t seed = 0;
    int jobs = 1;
    double histogram_bin = 25.0;
    std::string listen;  // "host:port" or "stdio", remote only
    std::string out_dir = ".";
    std::string dump_frames;  // empty = off
    std::string trace_path;   // empty = off

    HierarchySpec pct;
    CropConfig crop;
    GameLayout layout;
    SimConfig sim;

    // Throws ConfigError naming the first invalid field.
    void validate() const;

    [[nodiscard]] int frameskip() const { return sim.frameskip; }
};

// Built-in presets. The remote presets target real ALE frames and are
// best-effort values, not measurements.
RunConfig preset(EnvKind env, Game game);

// Values given on the command line; they win over the file.
struct CliOverrides {
    std::optional<int> episodes;
    std::optional<std::uint64_t> seed;
    std::optional<PolicyKind> policy;
    std::optional<EnvKind> environment;
    std::optional<std::string> listen;
    std::optional<std::string> out_dir;
    std::optional<std::string> dump_frames;
    std::optional<int> jobs;
};

// Starts from the preset selected by [run] env/game, applies every key of the
// document, then the overrides. Unknown sections or keys throw ConfigError.
RunConfig build_run_config(const IniDocument& doc, const CliOverrides& cli = {});

}  // namespace pct
