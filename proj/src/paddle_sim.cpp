#include "pctagent/paddle_sim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

namespace pct {

const char* to_string(Game g) { return g == Game::breakout ? "breakout" : "pong"; }

const char* to_string(SimEvent e) {
    switch (e) {
        case SimEvent::brick_hit: return "brick_hit";
        case SimEvent::life_lost: return "life_lost";
        case SimEvent::point_for: return "point_for";
        case SimEvent::point_against: return "point_against";
        case SimEvent::wall_bounce: return "wall_bounce";
        case SimEvent::paddle_bounce: return "paddle_bounce";
    }
    return "?";
}

SimConfig SimConfig::breakout_defaults() { return SimConfig{}; }

SimConfig SimConfig::pong_defaults() {
    SimConfig c;
    c.game = Game::pong;
    c.field_left = 14;
    c.field_top = 55;
    c.field_width = 132;
    c.field_height = 100;
    c.paddle_line = 140;
    c.opponent_line = 16;
    c.ball_speedup = 0.1;
    c.ball_speed_max = 1.5;
    c.opponent_speed = 0.6;
    return c;
}

void SimConfig::validate() const {
    auto require = [](bool ok, const char* field) {
        if (!ok) throw ConfigError(std::string("invalid sim config: ") + field);
    };
    require(frame_width > 0 && frame_height > 0, "frame_width/frame_height must be positive");
    require(field_width > 0 && field_height > 0, "field_width/field_height must be positive");
    require(field_left >= 0 && field_top >= 0 && field_left + field_width <= frame_width &&
                field_top + field_height <= frame_height,
            "field must lie inside the frame");
    require(paddle_length > 0 && paddle_thickness > 0, "paddle_length/paddle_thickness must be positive");
    require(paddle_accel > 0.0, "paddle_accel must be positive");
    require(paddle_speed > 0.0, "paddle_speed must be positive");
    require(paddle_friction >= 0.0, "paddle_friction must be non-negative");
    require(ball_size > 0, "ball_size must be positive");
    require(ball_speed > 0.0, "ball_speed must be positive");
    require(ball_speedup >= 0.0, "ball_speedup must be non-negative");
    require(ball_speed_max >= ball_speed && ball_speed_max < ball_size + paddle_thickness,
            "ball_speed_max must be >= ball_speed and below tunnelling speed");
    require(serve_max_angle_deg >= 0.0 && serve_max_angle_deg < 90.0, "serve_max_angle_deg must be in [0, 90)");
    require(bounce_max_angle_deg >= 0.0 && bounce_max_angle_deg < 90.0, "bounce_max_angle_deg must be in [0, 90)");
    require(frameskip >= 1, "frameskip must be >= 1");
    if (game == Game::breakout) {
        require(brick_rows > 0 && brick_cols > 0 && brick_height > 0, "brick grid dimensions must be positive");
        require(field_width % brick_cols == 0, "field_width must be divisible by brick_cols");
        require(static_cast<int>(row_values.size()) == brick_rows, "row_values must have brick_rows entries");
        require(brick_top >= field_top && brick_top + brick_rows * brick_height <= field_top + field_height,
                "bricks must lie inside the field");
        require(lives > 0, "lives must be positive");
        require(paddle_line > field_top && paddle_line + paddle_thickness <= field_top + field_height,
                "paddle_line must lie inside the field");
        require(serve_row > brick_top + brick_rows * brick_height && serve_row < paddle_line,
                "serve_row must lie between bricks and paddle");
        require(paddle_length < field_width, "paddle_length must be smaller than field_width");
    } else {
        require(win_score > 0, "win_score must be positive");
        require(opponent_speed > 0.0, "opponent_speed must be positive");
        require(serve_delay >= 0, "serve_delay must be non-negative");
        require(paddle_line > field_left && paddle_line + paddle_thickness <= field_left + field_width,
                "paddle_line must lie inside the field");
        require(opponent_line >= field_left && opponent_line + paddle_thickness < paddle_line,
                "opponent_line must lie left of the paddle");
        require(paddle_length < field_height, "paddle_length must be smaller than field_height");
    }
}

int SimState::dead_brick_value(const SimConfig& cfg) const {
    int total = 0;
    for (int r = 0; r < cfg.brick_rows; ++r) {
        for (int c = 0; c < cfg.brick_cols; ++c) {
            if (!brick_alive(cfg, r, c)) total += cfg.row_values[r];
        }
    }
    return total;
}

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + (hi - lo) * uniform(rng); }

struct Extent {
    double lo;
    double hi;
};

// Range of paddle centres along the control axis.
Extent paddle_range(const SimConfig& cfg) {
    const double half = cfg.paddle_length / 2.0;
    if (cfg.game == Game::breakout) {
        return {cfg.field_left - 0.5 + half, cfg.field_left + cfg.field_width - 0.5 - half};
    }
    return {cfg.field_top - 0.5 + half, cfg.field_top + cfg.field_height - 0.5 - half};
}

double field_centre(const SimConfig& cfg) {
    const Extent r = paddle_range(cfg);
    return (r.lo + r.hi) / 2.0;
}

// +1 toward increasing coordinate, -1 toward decreasing, 0 for no press.
int press_direction(Action a, Game g) {
    if (a == Action::right) return g == Game::breakout ? 1 : -1;
    if (a == Action::left) return g == Game::breakout ? -1 : 1;
    return 0;
}

void move_paddle(SimState& s, const SimConfig& cfg, int dir) {
    if (dir != 0) {
        s.paddle_vel = std::clamp(s.paddle_vel + dir * cfg.paddle_accel, -cfg.paddle_speed, cfg.paddle_speed);
    } else if (s.paddle_vel > 0.0) {
        s.paddle_vel = std::max(0.0, s.paddle_vel - cfg.paddle_friction);
    } else {
        s.paddle_vel = std::min(0.0, s.paddle_vel + cfg.paddle_friction);
    }
    s.paddle_pos += s.paddle_vel;
    const Extent r = paddle_range(cfg);
    if (s.paddle_pos < r.lo) {
        s.paddle_pos = r.lo;
        s.paddle_vel = 0.0;
    } else if (s.paddle_pos > r.hi) {
        s.paddle_pos = r.hi;
        s.paddle_vel = 0.0;
    }
}

void serve(SimState& s, const SimConfig& cfg) {
    const double angle = uniform(s.rng, -cfg.serve_max_angle_deg, cfg.serve_max_angle_deg) * kDegToRad;
    s.ball_speed = cfg.ball_speed;
    if (cfg.game == Game::breakout) {
        s.ball_x = uniform(s.rng, cfg.field_left + cfg.field_width * 0.25, cfg.field_left + cfg.field_width * 0.75);
        s.ball_y = cfg.serve_row;
        s.ball_vx = s.ball_speed * std::sin(angle);
        s.ball_vy = s.ball_speed * std::cos(angle);
    } else {
        const double toward = (s.serves % 2 == 0) ? 1.0 : -1.0;
        s.ball_x = cfg.field_left + (cfg.field_width - 1) / 2.0;
        s.ball_y = uniform(s.rng, cfg.field_top + cfg.field_height * 0.25, cfg.field_top + cfg.field_height * 0.75);
        s.ball_vx = toward * s.ball_speed * std::cos(angle);
        s.ball_vy = s.ball_speed * std::sin(angle);
    }
    s.ball_in_play = true;
    ++s.serves;
}

// Outgoing angle from the contact offset, clamped to the bounce limit.
double bounce_angle(double offset, double reach, const SimConfig& cfg) {
    return std::clamp(offset / reach, -1.0, 1.0) * cfg.bounce_max_angle_deg * kDegToRad;
}

void speed_up(SimState& s, const SimConfig& cfg) { s.ball_speed = std::min(s.ball_speed + cfg.ball_speedup, cfg.ball_speed_max); }

void reflect_walls(SimState& s, const SimConfig& cfg, StepOutcome& out, bool top, bool bottom, bool sides) {
    const double half = cfg.ball_size / 2.0;
    const double left = cfg.field_left - 0.5;
    const double right = cfg.field_left + cfg.field_width - 0.5;
    const double upper = cfg.field_top - 0.5;
    const double lower = cfg.field_top + cfg.field_height - 0.5;
    if (sides) {
        if (s.ball_x - half < left) {
            s.ball_x = 2.0 * (left + half) - s.ball_x;
            s.ball_vx = -s.ball_vx;
            out.events.push_back(SimEvent::wall_bounce);
        } else if (s.ball_x + half > right) {
            s.ball_x = 2.0 * (right - half) - s.ball_x;
            s.ball_vx = -s.ball_vx;
            out.events.push_back(SimEvent::wall_bounce);
        }
    }
    if (top && s.ball_y - half < upper) {
        s.ball_y = 2.0 * (upper + half) - s.ball_y;
        s.ball_vy = -s.ball_vy;
        out.events.push_back(SimEvent::wall_bounce);
    }
    if (bottom && s.ball_y + half > lower) {
        s.ball_y = 2.0 * (lower - half) - s.ball_y;
        s.ball_vy = -s.ball_vy;
        out.events.push_back(SimEvent::wall_bounce);
    }
}

void hit_bricks(SimState& s, const SimConfig& cfg, StepOutcome& out, double prev_y) {
    const double half = cfg.ball_size / 2.0;
    const int bw = cfg.brick_width();
    const double bx0 = s.ball_x - half, bx1 = s.ball_x + half;
    const double by0 = s.ball_y - half, by1 = s.ball_y + half;
    int best_r = -1, best_c = -1;
    double best_d = 0.0;
    for (int r = 0; r < cfg.brick_rows; ++r) {
        const double y0 = cfg.brick_top + r * cfg.brick_height - 0.5;
        const double y1 = y0 + cfg.brick_height;
        if (by1 <= y0 || by0 >= y1) continue;
        for (int c = 0; c < cfg.brick_cols; ++c) {
            if (!s.brick_alive(cfg, r, c)) continue;
            const double x0 = cfg.field_left + c * bw - 0.5;
            const double x1 = x0 + bw;
            if (bx1 <= x0 || bx0 >= x1) continue;
            const double dx = (x0 + x1) / 2.0 - s.ball_x;
            const double dy = (y0 + y1) / 2.0 - s.ball_y;
            const double d = dx * dx + dy * dy;
            if (best_r < 0 || d < best_d) {
                best_r = r;
                best_c = c;
                best_d = d;
            }
        }
    }
    if (best_r < 0) return;
    s.bricks[static_cast<std::size_t>(best_r) * cfg.brick_cols + best_c] = 0;
    const int value = cfg.row_values[best_r];
    s.score += value;
    out.reward += value;
    out.events.push_back(SimEvent::brick_hit);
    s.ball_y = prev_y;
    s.ball_vy = -s.ball_vy;
}

void tick_breakout(SimState& s, const SimConfig& cfg, Action action, StepOutcome& out) {
    move_paddle(s, cfg, press_direction(action, cfg.game));
    if (!s.ball_in_play) {
        if (action == Action::fire) serve(s, cfg);
        return;
    }
    const double half = cfg.ball_size / 2.0;
    const double prev_y = s.ball_y;
    s.ball_x += s.ball_vx;
    s.ball_y += s.ball_vy;
    reflect_walls(s, cfg, out, true, false, true);
    hit_bricks(s, cfg, out, prev_y);

    const double paddle_top = cfg.paddle_line - 0.5;
    const double reach = cfg.paddle_length / 2.0 + half;
    if (s.ball_vy > 0.0 && prev_y + half <= paddle_top && s.ball_y + half > paddle_top &&
        std::abs(s.ball_x - s.paddle_pos) < reach) {
        const double a = bounce_angle(s.ball_x - s.paddle_pos, reach, cfg);
        s.ball_y = 2.0 * (paddle_top - half) - s.ball_y;
        speed_up(s, cfg);
        s.ball_vx = s.ball_speed * std::sin(a);
        s.ball_vy = -s.ball_speed * std::cos(a);
        out.events.push_back(SimEvent::paddle_bounce);
    }

    if (s.ball_y + half > cfg.field_top + cfg.field_height - 0.5) {
        s.ball_in_play = false;
        --s.lives;
        out.reward -= 1.0;
        out.events.push_back(SimEvent::life_lost);
        if (s.lives <= 0) s.terminal = true;
    }
    if (std::none_of(s.bricks.begin(), s.bricks.end(), [](std::uint8_t b) { return b != 0; })) s.terminal = true;
}

void tick_pong(SimState& s, const SimConfig& cfg, Action action, StepOutcome& out) {
    move_paddle(s, cfg, press_direction(action, cfg.game));

    const Extent range = paddle_range(cfg);
    const double target = s.ball_in_play ? s.ball_y : field_centre(cfg);
    const double step = std::clamp(target - s.opponent_pos, -cfg.opponent_speed, cfg.opponent_speed);
    s.opponent_pos = std::clamp(s.opponent_pos + step, range.lo, range.hi);

    if (!s.ball_in_play) {
        if (s.serve_timer > 0) --s.serve_timer;
        if (s.serve_timer == 0) serve(s, cfg);
        return;
    }
    const double half = cfg.ball_size / 2.0;
    const double prev_x = s.ball_x;
    s.ball_x += s.ball_vx;
    s.ball_y += s.ball_vy;
    reflect_walls(s, cfg, out, true, true, false);

    const double reach = cfg.paddle_length / 2.0 + half;
    const double agent_face = cfg.paddle_line - 0.5;
    const double opponent_face = cfg.opponent_line + cfg.paddle_thickness - 0.5;
    if (s.ball_vx > 0.0 && prev_x + half <= agent_face && s.ball_x + half > agent_face &&
        std::abs(s.ball_y - s.paddle_pos) < reach) {
        const double a = bounce_angle(s.ball_y - s.paddle_pos, reach, cfg);
        s.ball_x = 2.0 * (agent_face - half) - s.ball_x;
        speed_up(s, cfg);
        s.ball_vx = -s.ball_speed * std::cos(a);
        s.ball_vy = s.ball_speed * std::sin(a);
        out.events.push_back(SimEvent::paddle_bounce);
    } else if (s.ball_vx < 0.0 && prev_x - half >= opponent_face && s.ball_x - half < opponent_face &&
               std::abs(s.ball_y - s.opponent_pos) < reach) {
        const double a = bounce_angle(s.ball_y - s.opponent_pos, reach, cfg);
        s.ball_x = 2.0 * (opponent_face + half) - s.ball_x;
        speed_up(s, cfg);
        s.ball_vx = s.ball_speed * std::cos(a);
        s.ball_vy = s.ball_speed * std::sin(a);
        out.events.push_back(SimEvent::paddle_bounce);
    }

    const bool past_right = s.ball_x + half > cfg.field_left + cfg.field_width - 0.5;
    const bool past_left = s.ball_x - half < cfg.field_left - 0.5;
    if (past_right || past_left) {
        s.ball_in_play = false;
        s.serve_timer = cfg.serve_delay;
        if (past_right) {
            ++s.points_against;
            out.reward -= 1.0;
            out.events.push_back(SimEvent::point_against);
        } else {
            ++s.points_for;
            out.reward += 1.0;
            out.events.push_back(SimEvent::point_for);
        }
        s.score = s.points_for - s.points_against;
        if (s.points_for >= cfg.win_score || s.points_against >= cfg.win_score) s.terminal = true;
    }
}

void fill_rect(RawFrame& f, int row0, int col0, int rows, int cols, std::uint8_t lum) {
    const int r_begin = std::max(0, row0), r_end = std::min(f.height, row0 + rows);
    const int c_begin = std::max(0, col0), c_end = std::min(f.width, col0 + cols);
    for (int r = r_begin; r < r_end; ++r) {
        for (int c = c_begin; c < c_end; ++c) f.at(r, c) = lum;
    }
}

// First pixel index of an object of `size` pixels centred at `centre`.
int first_pixel(double centre, int size) { return static_cast<int>(std::floor(centre - (size - 1) / 2.0 + 0.5)); }

}  // namespace

SimState reset(const SimConfig& cfg) {
    cfg.validate();
    SimState s;
    s.rng.seed(cfg.seed);
    s.paddle_pos = field_centre(cfg);
    s.opponent_pos = s.paddle_pos;
    if (cfg.game == Game::breakout) {
        s.bricks.assign(static_cast<std::size_t>(cfg.brick_rows) * cfg.brick_cols, 1);
        s.lives = cfg.lives;
    } else {
        s.serve_timer = cfg.serve_delay;
    }
    return s;
}

StepOutcome sim_step(SimState& state, Action action, const SimConfig& cfg) {
    if (state.terminal) throw ContractViolation("sim_step called on a terminal state");
    StepOutcome out;
    for (int i = 0; i < cfg.frameskip && !state.terminal; ++i) {
        if (cfg.game == Game::breakout) {
            tick_breakout(state, cfg, action, out);
        } else {
            tick_pong(state, cfg, action, out);
        }
        ++state.tick;
    }
    out.terminal = state.terminal;
    return out;
}

RawFrame render(const SimState& s, const SimConfig& cfg) {
    constexpr std::uint8_t kWall = 142;
    constexpr std::uint8_t kObject = 200;
    constexpr std::uint8_t kBall = 236;
    RawFrame f(cfg.frame_width, cfg.frame_height);
    const int L = cfg.field_left, T = cfg.field_top, W = cfg.field_width, H = cfg.field_height;

    if (cfg.game == Game::breakout) {
        fill_rect(f, T - 8, L - 8, H + 8, 8, kWall);
        fill_rect(f, T - 8, L + W, H + 8, 8, kWall);
        fill_rect(f, T - 8, L, 8, W, kWall);
        const int bw = cfg.brick_width();
        for (int r = 0; r < cfg.brick_rows; ++r) {
            const auto lum = static_cast<std::uint8_t>(120 + 20 * (r % 6));
            for (int c = 0; c < cfg.brick_cols; ++c) {
                if (s.brick_alive(cfg, r, c)) fill_rect(f, cfg.brick_top + r * cfg.brick_height, L + c * bw, cfg.brick_height, bw, lum);
            }
        }
        fill_rect(f, cfg.paddle_line, first_pixel(s.paddle_pos, cfg.paddle_length), cfg.paddle_thickness,
                  cfg.paddle_length, kObject);
    } else {
        fill_rect(f, T - 4, L, 4, W, kWall);
        fill_rect(f, T + H, L, 4, W, kWall);
        fill_rect(f, first_pixel(s.paddle_pos, cfg.paddle_length), cfg.paddle_line, cfg.paddle_length,
                  cfg.paddle_thickness, kObject);
        fill_rect(f, first_pixel(s.opponent_pos, cfg.paddle_length), cfg.opponent_line, cfg.paddle_length,
                  cfg.paddle_thickness, kObject);
    }
    if (s.ball_in_play) {
        fill_rect(f, first_pixel(s.ball_y, cfg.ball_size), first_pixel(s.ball_x, cfg.ball_size), cfg.ball_size,
                  cfg.ball_size, kBall);
    }
    return f;
}

CropConfig sim_crop(const SimConfig& cfg) {
    CropConfig c;
    c.left_col = cfg.field_left;
    c.crop_width = cfg.field_width;
    if (cfg.game == Game::breakout) {
        c.crop_height = std::min(100, cfg.field_height);
        c.top_row = cfg.field_top + cfg.field_height - c.crop_height;
    } else {
        c.top_row = cfg.field_top;
        c.crop_height = cfg.field_height;
    }
    return c;
}

GameLayout sim_layout(const SimConfig& cfg) {
    const CropConfig crop = sim_crop(cfg);
    GameLayout g;
    if (cfg.game == Game::breakout) {
        g.axis = Axis::horizontal;
        g.paddle_zone = {cfg.paddle_line - crop.top_row - 1, crop.crop_height - 1, 0, crop.crop_width - 1};
    } else {
        g.axis = Axis::vertical;
        g.paddle_zone = {0, crop.crop_height - 1, cfg.paddle_line - crop.left_col - 1, crop.crop_width - 1};
    }
    g.ball_area_min = 1;
    g.ball_area_max = 4 * cfg.ball_size * cfg.ball_size;
    return g;
}

void write_pgm(const std::string& path, const RawFrame& frame) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(frame.pixels.data()), static_cast<std::streamsize>(frame.pixels.size()));
    if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace pct
