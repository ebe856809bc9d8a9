#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "pctagent/percept.hpp"

namespace pct {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Row-major 8-bit luminance image.
struct RawFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    RawFrame() = default;
    RawFrame(int w, int h, std::uint8_t fill = 0);
    RawFrame(int w, int h, std::vector<std::uint8_t> data);

    // Reduces interleaved RGB to luminance by taking the brightest channel.
    static RawFrame from_rgb(int w, int h, std::span<const std::uint8_t> rgb);

    std::uint8_t& at(int row, int col) { return pixels[static_cast<std::size_t>(row) * width + col]; }
    [[nodiscard]] std::uint8_t at(int row, int col) const {
        return pixels[static_cast<std::size_t>(row) * width + col];
    }

    bool operator==(const RawFrame&) const = default;
};

struct CropConfig {
    int top_row = 0;
    int left_col = 0;
    int crop_height = 100;
    int crop_width = 132;
    std::uint8_t threshold = 40;

    // Throws ConfigError unless the window lies inside a width x height frame.
    void validate(int frame_width, int frame_height) const;
};

class BinaryFrame {
public:
    BinaryFrame() = default;
    BinaryFrame(int rows, int cols) : rows_(rows), cols_(cols), cells_(static_cast<std::size_t>(rows) * cols, 0) {}

    [[nodiscard]] int rows() const { return rows_; }
    [[nodiscard]] int cols() const { return cols_; }
    [[nodiscard]] bool operator()(int r, int c) const { return cells_[static_cast<std::size_t>(r) * cols_ + c] != 0; }
    void set(int r, int c, bool v) { cells_[static_cast<std::size_t>(r) * cols_ + c] = v ? 1 : 0; }
    [[nodiscard]] const std::uint8_t* row(int r) const { return cells_.data() + static_cast<std::size_t>(r) * cols_; }
    std::uint8_t* row(int r) { return cells_.data() + static_cast<std::size_t>(r) * cols_; }
    [[nodiscard]] std::size_t count() const;

    bool operator==(const BinaryFrame&) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<std::uint8_t> cells_;
};

struct Blob {
    double centroid_x = 0.0;  // column
    double centroid_y = 0.0;  // row
    int min_row = 0;
    int max_row = 0;
    int min_col = 0;
    int max_col = 0;
    int area = 0;

    [[nodiscard]] int width() const { return max_col - min_col + 1; }
    [[nodiscard]] int height() const { return max_row - min_row + 1; }
};

// Rectangle in cropped coordinates, bounds inclusive.
struct Zone {
    int row_min = 0;
    int row_max = 0;
    int col_min = 0;
    int col_max = 0;

    [[nodiscard]] bool intersects(const Blob& b) const {
        return b.max_row >= row_min && b.min_row <= row_max && b.max_col >= col_min && b.min_col <= col_max;
    }
};

struct GameLayout {
    Zone paddle_zone{};
    int ball_area_min = 1;
    int ball_area_max = 16;
    double ball_max_aspect = 3.0;  // max of w/h and h/w
    int ball_hold = 4;             // frames a missing ball keeps its estimate
    Axis axis = Axis::horizontal;
    double direction_dead_band = 0.25;

    void validate() const;
};

BinaryFrame preprocess(const RawFrame& frame, const CropConfig& cfg);

// 4-connected components, largest first; ties keep raster order of each
// component's first pixel.
std::vector<Blob> detect_blobs(const BinaryFrame& bf);

struct Detections {
    std::optional<Blob> ball;
    std::optional<Blob> paddle;
};

Detections classify(std::span<const Blob> blobs, const GameLayout& layout);

PerceptState track(const PerceptState& prev, const std::optional<Blob>& ball, const std::optional<Blob>& paddle,
                   const GameLayout& layout);

// Runs the whole frame -> PerceptState pipeline, threading the tracker state.
class Perceiver {
public:
    Perceiver(CropConfig crop, GameLayout layout);

    const PerceptState& observe(const RawFrame& frame);
    void reset() { state_ = PerceptState{}; }

    [[nodiscard]] const PerceptState& state() const { return state_; }
    [[nodiscard]] const CropConfig& crop() const { return crop_; }
    [[nodiscard]] const GameLayout& layout() const { return layout_; }

private:
    CropConfig crop_;
    GameLayout layout_;
    PerceptState state_;
};

}  // namespace pct
