#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "pctagent/perception.hpp"

namespace pct {

enum class Game : std::uint8_t { breakout, pong };

const char* to_string(Game g);

class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Geometry is in full-frame pixel-index coordinates (x = column, y = row); a
// pixel index i covers the continuous interval [i - 0.5, i + 0.5]. Speeds are
// per physics tick.
struct SimConfig {
    Game game = Game::breakout;

    int frame_width = 160;
    int frame_height = 210;

    // Interior of the playing field.
    int field_left = 14;
    int field_top = 24;
    int field_width = 132;
    int field_height = 170;

    // Agent paddle. For breakout paddle_line is its top row and the paddle
    // moves horizontally; for pong it is its left column and it moves
    // vertically. paddle_length runs along the control axis.
    int paddle_line = 189;
    int paddle_length = 16;
    int paddle_thickness = 4;
    double paddle_accel = 0.125;     // velocity gained per tick of a held press
    double paddle_speed = 1.5;       // velocity cap
    double paddle_friction = 0.125;  // velocity lost per tick without a press

    int ball_size = 2;
    double ball_speed = 1.0;
    double ball_speedup = 0.0;     // added to the speed on every paddle contact
    double ball_speed_max = 1.0;
    double serve_max_angle_deg = 45.0;   // from the axis perpendicular to the paddle
    double bounce_max_angle_deg = 60.0;  // at the paddle edge

    // Breakout
    int brick_top = 57;
    int brick_rows = 6;
    int brick_cols = 12;
    int brick_height = 6;
    std::vector<int> row_values{7, 7, 4, 4, 1, 1};
    int serve_row = 100;
    int lives = 5;

    // Pong
    int opponent_line = 16;  // left column of the opponent paddle
    double opponent_speed = 0.75;
    int serve_delay = 30;
    int win_score = 21;

    int frameskip = 4;
    std::uint64_t seed = 0;

    static SimConfig breakout_defaults();
    static SimConfig pong_defaults();

    // Throws ConfigError naming the first invalid field.
    void validate() const;

    [[nodiscard]] int brick_width() const { return field_width / brick_cols; }
};

enum class SimEvent : std::uint8_t { brick_hit, life_lost, point_for, point_against, wall_bounce, paddle_bounce };

const char* to_string(SimEvent e);

struct StepOutcome {
    double reward = 0.0;
    bool terminal = false;
    std::vector<SimEvent> events;
};

struct SimState {
    double ball_x = 0.0;
    double ball_y = 0.0;
    double ball_vx = 0.0;
    double ball_vy = 0.0;
    double ball_speed = 0.0;  // reset to the configured speed on every serve
    bool ball_in_play = false;

    double paddle_pos = 0.0;  // centre along the control axis
    double paddle_vel = 0.0;
    double opponent_pos = 0.0;

    std::vector<std::uint8_t> bricks;  // row-major alive mask
    int lives = 0;
    int score = 0;
    int points_for = 0;
    int points_against = 0;
    long long tick = 0;
    int serve_timer = 0;
    int serves = 0;
    bool terminal = false;

    std::mt19937_64 rng;

    bool operator==(const SimState&) const = default;

    [[nodiscard]] bool brick_alive(const SimConfig& cfg, int row, int col) const {
        return bricks[static_cast<std::size_t>(row) * cfg.brick_cols + col] != 0;
    }
    [[nodiscard]] int dead_brick_value(const SimConfig& cfg) const;
};

SimState reset(const SimConfig& cfg);

// Repeats `action` for cfg.frameskip physics ticks (stopping early at a
// terminal tick) and sums the rewards. Throws ContractViolation on a terminal
// state.
StepOutcome sim_step(SimState& state, Action action, const SimConfig& cfg);

RawFrame render(const SimState& state, const SimConfig& cfg);

// Perception presets matching the simulator geometry.
CropConfig sim_crop(const SimConfig& cfg);
GameLayout sim_layout(const SimConfig& cfg);

// Writes a binary portable graymap (P5, maxval 255).
void write_pgm(const std::string& path, const RawFrame& frame);

}  // namespace pct
