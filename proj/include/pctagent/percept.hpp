#pragma once

#include <cstdint>

namespace pct {

// The single coordinate the paddle moves along. Breakout plays horizontally,
// Pong vertically.
enum class Axis : std::uint8_t { horizontal, vertical };

// Discrete action set, ordered like the ALE minimal action set for
// Breakout/Pong so the value doubles as the wire byte.
enum class Action : std::uint8_t { noop = 0, fire = 1, right = 2, left = 3 };

const char* to_string(Action a);

// What the controller knows about the scene after one frame. Positions are in
// cropped-frame pixel coordinates (column = x, row = y).
struct PerceptState {
    double ball_x = 0.0;
    double ball_y = 0.0;
    bool ball_valid = false;     // true on detection and during the hold window
    bool ball_detected = false;  // detected in this very frame
    double ball_vx = 0.0;
    double ball_vy = 0.0;
    bool ball_velocity_valid = false;  // needs two consecutive detections
    int stale_ticks = 0;               // frames since the last ball detection

    double paddle_axis = 0.0;   // paddle centroid along the control axis
    double paddle_delta = 0.0;  // paddle displacement since the previous frame
    bool paddle_valid = false;
    int paddle_direction = 0;  // sensed direction M_D in {-1, 0, +1}

    [[nodiscard]] double ball_axis(Axis axis) const {
        return axis == Axis::horizontal ? ball_x : ball_y;
    }
};

}  // namespace pct
