#include "pctagent/perception.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace pct {

RawFrame::RawFrame(int w, int h, std::uint8_t fill)
    : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, fill) {
    if (w < 0 || h < 0) throw ConfigError("frame dimensions must be non-negative");
}

RawFrame::RawFrame(int w, int h, std::vector<std::uint8_t> data) : width(w), height(h), pixels(std::move(data)) {
    if (w < 0 || h < 0 || pixels.size() != static_cast<std::size_t>(w) * h) {
        throw ConfigError("pixel buffer length does not match " + std::to_string(w) + "x" + std::to_string(h));
    }
}

RawFrame RawFrame::from_rgb(int w, int h, std::span<const std::uint8_t> rgb) {
    if (w < 0 || h < 0 || rgb.size() != static_cast<std::size_t>(w) * h * 3) {
        throw ConfigError("RGB buffer length does not match frame size");
    }
    RawFrame f(w, h);
    for (std::size_t i = 0; i < f.pixels.size(); ++i) {
        f.pixels[i] = std::max({rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]});
    }
    return f;
}

void CropConfig::validate(int frame_width, int frame_height) const {
    if (crop_height <= 0 || crop_width <= 0) throw ConfigError("crop_height and crop_width must be positive");
    if (top_row < 0 || left_col < 0) throw ConfigError("top_row and left_col must be non-negative");
    if (top_row + crop_height > frame_height) {
        throw ConfigError("crop rows [" + std::to_string(top_row) + ", " + std::to_string(top_row + crop_height) +
                          ") exceed frame height " + std::to_string(frame_height));
    }
    if (left_col + crop_width > frame_width) {
        throw ConfigError("crop cols [" + std::to_string(left_col) + ", " + std::to_string(left_col + crop_width) +
                          ") exceed frame width " + std::to_string(frame_width));
    }
}

std::size_t BinaryFrame::count() const {
    return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

void GameLayout::validate() const {
    if (paddle_zone.row_min > paddle_zone.row_max || paddle_zone.col_min > paddle_zone.col_max) {
        throw ConfigError("paddle_zone bounds are inverted");
    }
    if (ball_area_min < 1 || ball_area_max < ball_area_min) throw ConfigError("ball area bounds are invalid");
    if (!(ball_max_aspect >= 1.0)) throw ConfigError("ball_max_aspect must be >= 1");
    if (ball_hold < 0) throw ConfigError("ball_hold must be >= 0");
}

BinaryFrame preprocess(const RawFrame& frame, const CropConfig& cfg) {
    cfg.validate(frame.width, frame.height);
    BinaryFrame out(cfg.crop_height, cfg.crop_width);
    for (int r = 0; r < cfg.crop_height; ++r) {
        const std::uint8_t* src = &frame.pixels[static_cast<std::size_t>(cfg.top_row + r) * frame.width + cfg.left_col];
        std::uint8_t* dst = out.row(r);
        for (int c = 0; c < cfg.crop_width; ++c) dst[c] = src[c] > cfg.threshold ? 1 : 0;
    }
    return out;
}

namespace {

// Union-find over run labels. Roots are always the smallest label of their
// set, i.e. the raster-first run of the component.
struct Labels {
    std::vector<int> parent;

    int make() {
        parent.push_back(static_cast<int>(parent.size()));
        return parent.back();
    }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a < b) {
            parent[b] = a;
        } else if (b < a) {
            parent[a] = b;
        }
    }
};

// Horizontal run of foreground cells, columns inclusive.
struct Run {
    int row;
    int c0;
    int c1;
    int label;
};

}  // namespace

std::vector<Blob> detect_blobs(const BinaryFrame& bf) {
    const int rows = bf.rows();
    const int cols = bf.cols();
    std::vector<Run> runs;
    Labels uf;

    std::size_t prev_begin = 0, prev_end = 0;
    for (int r = 0; r < rows; ++r) {
        const std::uint8_t* row = bf.row(r);
        const std::uint8_t* end = row + cols;
        const std::size_t row_begin = runs.size();
        std::size_t p = prev_begin;
        const std::uint8_t* it = row;
        while ((it = std::find(it, end, std::uint8_t{1})) != end) {
            const std::uint8_t* stop = std::find(it, end, std::uint8_t{0});
            const int c0 = static_cast<int>(it - row);
            const int c1 = static_cast<int>(stop - row) - 1;
            int label = -1;
            // Previous-row runs are sorted by column; skip those ending left of c0.
            while (p < prev_end && runs[p].c1 < c0) ++p;
            for (std::size_t q = p; q < prev_end && runs[q].c0 <= c1; ++q) {
                if (label < 0) {
                    label = runs[q].label;
                } else {
                    uf.unite(label, runs[q].label);
                }
            }
            if (label < 0) label = uf.make();
            runs.push_back({r, c0, c1, label});
            it = stop;
        }
        prev_begin = row_begin;
        prev_end = runs.size();
    }

    struct Accum {
        long long sum_row = 0;
        long long sum_col = 0;
        int area = 0;
        int min_row = 0, max_row = 0, min_col = 0, max_col = 0;
    };
    std::vector<int> slot(uf.parent.size(), -1);
    std::vector<Accum> acc;
    for (const Run& run : runs) {
        const int root = uf.find(run.label);
        if (slot[root] < 0) {
            slot[root] = static_cast<int>(acc.size());
            Accum a;
            a.min_row = a.max_row = run.row;
            a.min_col = run.c0;
            a.max_col = run.c1;
            acc.push_back(a);
        }
        Accum& a = acc[static_cast<std::size_t>(slot[root])];
        const int len = run.c1 - run.c0 + 1;
        a.area += len;
        a.sum_row += static_cast<long long>(run.row) * len;
        a.sum_col += static_cast<long long>(run.c0 + run.c1) * len / 2;
        a.max_row = run.row;
        a.min_col = std::min(a.min_col, run.c0);
        a.max_col = std::max(a.max_col, run.c1);
    }

    // acc is in raster order of each component's first pixel; a stable sort
    // keeps that order among equal areas.
    std::stable_sort(acc.begin(), acc.end(), [](const Accum& a, const Accum& b) { return a.area > b.area; });

    std::vector<Blob> blobs;
    blobs.reserve(acc.size());
    for (const Accum& a : acc) {
        Blob b;
        b.area = a.area;
        b.centroid_x = static_cast<double>(a.sum_col) / a.area;
        b.centroid_y = static_cast<double>(a.sum_row) / a.area;
        b.min_row = a.min_row;
        b.max_row = a.max_row;
        b.min_col = a.min_col;
        b.max_col = a.max_col;
        blobs.push_back(b);
    }
    return blobs;
}

Detections classify(std::span<const Blob> blobs, const GameLayout& layout) {
    Detections d;
    for (const Blob& b : blobs) {
        if (layout.paddle_zone.intersects(b)) {
            if (!d.paddle || b.area > d.paddle->area) d.paddle = b;
            continue;
        }
        if (d.ball || b.area < layout.ball_area_min || b.area > layout.ball_area_max) continue;
        const double w = b.width();
        const double h = b.height();
        if (std::max(w / h, h / w) <= layout.ball_max_aspect) d.ball = b;
    }
    return d;
}

PerceptState track(const PerceptState& prev, const std::optional<Blob>& ball, const std::optional<Blob>& paddle,
                   const GameLayout& layout) {
    PerceptState s = prev;

    if (ball) {
        s.ball_x = ball->centroid_x;
        s.ball_y = ball->centroid_y;
        s.ball_velocity_valid = prev.ball_detected;
        if (s.ball_velocity_valid) {
            s.ball_vx = s.ball_x - prev.ball_x;
            s.ball_vy = s.ball_y - prev.ball_y;
        } else {
            s.ball_vx = s.ball_vy = 0.0;
        }
        s.ball_detected = true;
        s.ball_valid = true;
        s.stale_ticks = 0;
    } else {
        s.ball_detected = false;
        s.ball_velocity_valid = false;
        ++s.stale_ticks;
        // A ball never seen stays invalid; a lost one survives the hold window.
        s.ball_valid = prev.ball_valid && s.stale_ticks <= layout.ball_hold;
    }

    if (paddle) {
        const double pos = layout.axis == Axis::horizontal ? paddle->centroid_x : paddle->centroid_y;
        if (prev.paddle_valid) {
            s.paddle_delta = pos - prev.paddle_axis;
            if (s.paddle_delta > layout.direction_dead_band) {
                s.paddle_direction = 1;
            } else if (s.paddle_delta < -layout.direction_dead_band) {
                s.paddle_direction = -1;
            } else {
                s.paddle_direction = 0;
            }
        } else {
            s.paddle_delta = 0.0;
            s.paddle_direction = 0;
        }
        s.paddle_axis = pos;
        s.paddle_valid = true;
    } else {
        s.paddle_valid = false;
        s.paddle_delta = 0.0;
        s.paddle_direction = 0;
    }
    return s;
}

Perceiver::Perceiver(CropConfig crop, GameLayout layout) : crop_(crop), layout_(layout) { layout_.validate(); }

const PerceptState& Perceiver::observe(const RawFrame& frame) {
    const BinaryFrame bf = preprocess(frame, crop_);
    const std::vector<Blob> blobs = detect_blobs(bf);
    const Detections d = classify(blobs, layout_);
    state_ = track(state_, d.ball, d.paddle, layout_);
    return state_;
}

}  // namespace pct
