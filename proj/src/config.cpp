#include "pctagent/config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

namespace pct {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) parts.push_back(trim(item));
    return parts;
}

[[noreturn]] void bad_value(const std::string& where, const std::string& value, const char* expected) {
    throw ConfigError(where + ": expected " + expected + ", got '" + value + "'");
}

long long to_int(const std::string& where, const std::string& v) {
    long long out = 0;
    const auto* end = v.data() + v.size();
    const auto [p, ec] = std::from_chars(v.data(), end, out);
    if (ec != std::errc{} || p != end) bad_value(where, v, "an integer");
    return out;
}

double to_real(const std::string& where, const std::string& v) {
    try {
        std::size_t used = 0;
        const double d = std::stod(v, &used);
        if (used != v.size()) bad_value(where, v, "a number");
        return d;
    } catch (const std::logic_error&) {
        bad_value(where, v, "a number");
    }
}

bool to_bool(const std::string& where, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(where, v, "a boolean");
}

Axis to_axis(const std::string& where, const std::string& v) {
    if (v == "horizontal") return Axis::horizontal;
    if (v == "vertical") return Axis::vertical;
    bad_value(where, v, "horizontal|vertical");
}

Game to_game(const std::string& where, const std::string& v) {
    if (v == "breakout") return Game::breakout;
    if (v == "pong") return Game::pong;
    bad_value(where, v, "breakout|pong");
}

using Setter = std::function<void(RunConfig&, const std::string& where, const std::string& value)>;
using KeyTable = std::map<std::string, Setter>;

template <typename T>
Setter int_field(T RunConfig::*group, int T::*field) {
    return [=](RunConfig& c, const std::string& w, const std::string& v) {
        c.*group.*field = static_cast<int>(to_int(w, v));
    };
}

template <typename T>
Setter real_field(T RunConfig::*group, double T::*field) {
    return [=](RunConfig& c, const std::string& w, const std::string& v) { c.*group.*field = to_real(w, v); };
}

const std::map<std::string, KeyTable>& key_tables() {
    static const std::map<std::string, KeyTable> tables = {
        {"run",
         {
             {"env", [](RunConfig& c, const std::string& w, const std::string& v) {
                  try {
                      c.environment = parse_env(v);
                  } catch (const std::invalid_argument&) {
                      bad_value(w, v, "sim_breakout|sim_pong|remote");
                  }
              }},
             {"game", [](RunConfig& c, const std::string& w, const std::string& v) { c.game = to_game(w, v); }},
             {"episodes", [](RunConfig& c, const std::string& w, const std::string& v) { c.episodes = static_cast<int>(to_int(w, v)); }},
             {"max_steps", [](RunConfig& c, const std::string& w, const std::string& v) { c.max_steps = static_cast<int>(to_int(w, v)); }},
             {"policy", [](RunConfig& c, const std::string& w, const std::string& v) {
                  try {
                      c.policy = parse_policy(v);
                  } catch (const std::invalid_argument&) {
                      bad_value(w, v, "pct|random");
                  }
              }},
             {"frameskip", [](RunConfig& c, const std::string& w, const std::string& v) { c.sim.frameskip = static_cast<int>(to_int(w, v)); }},
             {"deterministic", [](RunConfig& c, const std::string& w, const std::string& v) { c.deterministic = to_bool(w, v); }},
             {"seed", [](RunConfig& c, const std::string& w, const std::string& v) {
                  const long long s = to_int(w, v);
                  if (s < 0) bad_value(w, v, "a non-negative integer");
                  c.seed = static_cast<std::uint64_t>(s);
              }},
             {"jobs", [](RunConfig& c, const std::string& w, const std::string& v) { c.jobs = static_cast<int>(to_int(w, v)); }},
             {"histogram_bin", [](RunConfig& c, const std::string& w, const std::string& v) { c.histogram_bin = to_real(w, v); }},
             {"listen", [](RunConfig& c, const std::string&, const std::string& v) { c.listen = v; }},
             {"out", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
             {"dump_frames", [](RunConfig& c, const std::string&, const std::string& v) { c.dump_frames = v; }},
             {"trace", [](RunConfig& c, const std::string&, const std::string& v) { c.trace_path = v; }},
         }},
        {"pct",
         {
             {"gains", [](RunConfig& c, const std::string& w, const std::string& v) {
                  const auto parts = split_list(v);
                  if (parts.size() != 4) bad_value(w, v, "four comma-separated gains");
                  for (std::size_t i = 0; i < 4; ++i) c.pct.gains[i] = to_real(w, parts[i]);
              }},
             {"top_reference", real_field(&RunConfig::pct, &HierarchySpec::top_reference)},
             {"integrator_limit", int_field(&RunConfig::pct, &HierarchySpec::integrator_limit)},
             {"press_rate_scale", real_field(&RunConfig::pct, &HierarchySpec::press_rate_scale)},
             {"axis", [](RunConfig& c, const std::string& w, const std::string& v) {
                  c.pct.axis = to_axis(w, v);
                  c.layout.axis = c.pct.axis;
              }},
             {"fire_hold", int_field(&RunConfig::pct, &HierarchySpec::fire_hold)},
         }},
        {"crop",
         {
             {"top_row", int_field(&RunConfig::crop, &CropConfig::top_row)},
             {"left_col", int_field(&RunConfig::crop, &CropConfig::left_col)},
             {"crop_height", int_field(&RunConfig::crop, &CropConfig::crop_height)},
             {"crop_width", int_field(&RunConfig::crop, &CropConfig::crop_width)},
             {"threshold", [](RunConfig& c, const std::string& w, const std::string& v) {
                  const long long t = to_int(w, v);
                  if (t < 0 || t > 255) bad_value(w, v, "an integer in [0, 255]");
                  c.crop.threshold = static_cast<std::uint8_t>(t);
              }},
         }},
        {"layout",
         {
             {"paddle_zone", [](RunConfig& c, const std::string& w, const std::string& v) {
                  const auto parts = split_list(v);
                  if (parts.size() != 4) bad_value(w, v, "row_min,row_max,col_min,col_max");
                  c.layout.paddle_zone = {static_cast<int>(to_int(w, parts[0])), static_cast<int>(to_int(w, parts[1])),
                                          static_cast<int>(to_int(w, parts[2])), static_cast<int>(to_int(w, parts[3]))};
              }},
             {"ball_area_min", int_field(&RunConfig::layout, &GameLayout::ball_area_min)},
             {"ball_area_max", int_field(&RunConfig::layout, &GameLayout::ball_area_max)},
             {"ball_max_aspect", real_field(&RunConfig::layout, &GameLayout::ball_max_aspect)},
             {"ball_hold", int_field(&RunConfig::layout, &GameLayout::ball_hold)},
             {"direction_dead_band", real_field(&RunConfig::layout, &GameLayout::direction_dead_band)},
         }},
        {"sim",
         {
             {"field_left", int_field(&RunConfig::sim, &SimConfig::field_left)},
             {"field_top", int_field(&RunConfig::sim, &SimConfig::field_top)},
             {"field_width", int_field(&RunConfig::sim, &SimConfig::field_width)},
             {"field_height", int_field(&RunConfig::sim, &SimConfig::field_height)},
             {"paddle_line", int_field(&RunConfig::sim, &SimConfig::paddle_line)},
             {"paddle_length", int_field(&RunConfig::sim, &SimConfig::paddle_length)},
             {"paddle_thickness", int_field(&RunConfig::sim, &SimConfig::paddle_thickness)},
             {"paddle_accel", real_field(&RunConfig::sim, &SimConfig::paddle_accel)},
             {"paddle_speed", real_field(&RunConfig::sim, &SimConfig::paddle_speed)},
             {"paddle_friction", real_field(&RunConfig::sim, &SimConfig::paddle_friction)},
             {"ball_size", int_field(&RunConfig::sim, &SimConfig::ball_size)},
             {"ball_speed", real_field(&RunConfig::sim, &SimConfig::ball_speed)},
             {"ball_speedup", real_field(&RunConfig::sim, &SimConfig::ball_speedup)},
             {"ball_speed_max", real_field(&RunConfig::sim, &SimConfig::ball_speed_max)},
             {"serve_max_angle_deg", real_field(&RunConfig::sim, &SimConfig::serve_max_angle_deg)},
             {"bounce_max_angle_deg", real_field(&RunConfig::sim, &SimConfig::bounce_max_angle_deg)},
             {"brick_top", int_field(&RunConfig::sim, &SimConfig::brick_top)},
             {"brick_rows", int_field(&RunConfig::sim, &SimConfig::brick_rows)},
             {"brick_cols", int_field(&RunConfig::sim, &SimConfig::brick_cols)},
             {"brick_height", int_field(&RunConfig::sim, &SimConfig::brick_height)},
             {"row_values", [](RunConfig& c, const std::string& w, const std::string& v) {
                  c.sim.row_values.clear();
                  for (const auto& p : split_list(v)) c.sim.row_values.push_back(static_cast<int>(to_int(w, p)));
              }},
             {"serve_row", int_field(&RunConfig::sim, &SimConfig::serve_row)},
             {"lives", int_field(&RunConfig::sim, &SimConfig::lives)},
             {"opponent_line", int_field(&RunConfig::sim, &SimConfig::opponent_line)},
             {"opponent_speed", real_field(&RunConfig::sim, &SimConfig::opponent_speed)},
             {"serve_delay", int_field(&RunConfig::sim, &SimConfig::serve_delay)},
             {"win_score", int_field(&RunConfig::sim, &SimConfig::win_score)},
         }},
    };
    return tables;
}

}  // namespace

IniDocument IniDocument::parse(std::istream& in) {
    IniDocument doc;
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']') throw ConfigError("line " + std::to_string(lineno) + ": unterminated section header");
            section = trim(t.substr(1, t.size() - 2));
            if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty section name");
            doc.sections_[section];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        if (section.empty()) throw ConfigError("line " + std::to_string(lineno) + ": key outside of any section");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        doc.sections_[section][key] = trim(t.substr(eq + 1));
    }
    return doc;
}

IniDocument IniDocument::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse(in);
}

std::optional<std::string> IniDocument::get(const std::string& section, const std::string& key) const {
    const auto s = sections_.find(section);
    if (s == sections_.end()) return std::nullopt;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    return k->second;
}

const char* to_string(EnvKind e) {
    switch (e) {
        case EnvKind::sim_breakout: return "sim_breakout";
        case EnvKind::sim_pong: return "sim_pong";
        case EnvKind::remote: return "remote";
    }
    return "?";
}

const char* to_string(PolicyKind p) { return p == PolicyKind::pct ? "pct" : "random"; }

EnvKind parse_env(const std::string& s) {
    if (s == "sim_breakout") return EnvKind::sim_breakout;
    if (s == "sim_pong") return EnvKind::sim_pong;
    if (s == "remote") return EnvKind::remote;
    throw std::invalid_argument("unknown environment '" + s + "'");
}

PolicyKind parse_policy(const std::string& s) {
    if (s == "pct") return PolicyKind::pct;
    if (s == "random") return PolicyKind::random;
    throw std::invalid_argument("unknown policy '" + s + "'");
}

RunConfig preset(EnvKind env, Game game) {
    RunConfig c;
    c.environment = env;
    c.game = env == EnvKind::sim_breakout ? Game::breakout : env == EnvKind::sim_pong ? Game::pong : game;
    c.sim = c.game == Game::breakout ? SimConfig::breakout_defaults() : SimConfig::pong_defaults();
    c.histogram_bin = c.game == Game::breakout ? 25.0 : 1.0;
    if (env != EnvKind::remote) {
        c.crop = sim_crop(c.sim);
        c.layout = sim_layout(c.sim);
    } else if (c.game == Game::breakout) {
        // ALE Breakout: black background, paddle on rows 189-192 between side
        // walls at columns 0-7 and 152-159.
        c.crop = {93, 8, 100, 144, 40};
        c.layout.paddle_zone = {95, 99, 0, 143};
        c.layout.ball_area_min = 1;
        c.layout.ball_area_max = 16;
    } else {
        // ALE Pong: brown background (brightest channel 144), agent paddle on
        // columns 140-143, opponent on 16-19, play rows 34-193.
        c.crop = {34, 14, 160, 132, 150};
        c.layout.paddle_zone = {0, 159, 125, 131};
        c.layout.ball_area_min = 1;
        c.layout.ball_area_max = 16;
    }
    c.pct.axis = c.game == Game::breakout ? Axis::horizontal : Axis::vertical;
    c.layout.axis = c.pct.axis;
    return c;
}

void RunConfig::validate() const {
    if (episodes < 1) throw ConfigError("run.episodes must be >= 1");
    if (max_steps < 0) throw ConfigError("run.max_steps must be >= 0");
    if (jobs < 1) throw ConfigError("run.jobs must be >= 1");
    if (!(histogram_bin > 0.0)) throw ConfigError("run.histogram_bin must be positive");
    if (environment == EnvKind::remote && listen.empty()) {
        throw ConfigError("run.listen is required for the remote environment");
    }
    try {
        pct.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("pct.") + e.what());
    }
    if (pct.axis != layout.axis) throw ConfigError("pct.axis and the layout axis disagree");
    layout.validate();
    if (environment != EnvKind::remote) {
        sim.validate();
        if ((environment == EnvKind::sim_breakout) != (sim.game == Game::breakout)) {
            throw ConfigError("sim game does not match run.env");
        }
        crop.validate(sim.frame_width, sim.frame_height);
    } else if (crop.crop_width <= 0 || crop.crop_height <= 0) {
        throw ConfigError("crop dimensions must be positive");
    }
}

RunConfig build_run_config(const IniDocument& doc, const CliOverrides& cli) {
    const auto& tables = key_tables();
    for (const auto& [name, keys] : doc.sections()) {
        const auto t = tables.find(name);
        if (t == tables.end()) throw ConfigError("unknown config section [" + name + "]");
        for (const auto& [key, value] : keys) {
            if (!t->second.contains(key)) throw ConfigError("unknown config key " + name + "." + key);
        }
    }

    EnvKind env = EnvKind::sim_breakout;
    if (auto v = doc.get("run", "env")) {
        RunConfig scratch;
        tables.at("run").at("env")(scratch, "run.env", *v);
        env = scratch.environment;
    }
    if (cli.environment) env = *cli.environment;
    Game game = Game::breakout;
    if (auto v = doc.get("run", "game")) game = to_game("run.game", *v);

    RunConfig c = preset(env, game);
    // Simulator geometry first so the derived crop and layout follow it;
    // explicit [crop]/[layout] keys still win.
    for (const char* name : {"run", "sim", "pct", "crop", "layout"}) {
        const auto s = doc.sections().find(name);
        if (s != doc.sections().end()) {
            const KeyTable& table = tables.at(name);
            for (const auto& [key, value] : s->second) {
                if (s->first == "run" && (key == "env" || key == "game")) continue;
                table.at(key)(c, s->first + "." + key, value);
            }
        }
        if (std::string_view(name) == "sim" && env != EnvKind::remote) {
            const Axis axis = c.layout.axis;
            c.crop = sim_crop(c.sim);
            c.layout = sim_layout(c.sim);
            c.layout.axis = axis;
        }
    }

    if (cli.episodes) c.episodes = *cli.episodes;
    if (cli.seed) c.seed = *cli.seed;
    if (cli.policy) c.policy = *cli.policy;
    if (cli.listen) c.listen = *cli.listen;
    if (cli.out_dir) c.out_dir = *cli.out_dir;
    if (cli.dump_frames) c.dump_frames = *cli.dump_frames;
    if (cli.jobs) c.jobs = *cli.jobs;
    c.sim.seed = c.seed;
    c.validate();
    return c;
}

}  // namespace pct
