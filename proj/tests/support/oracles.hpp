#pragma once

// Reference implementations written independently of the library, used to
// cross-check it in tests.

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "pctagent/perception.hpp"

namespace pct::oracle {

struct Component {
    int area = 0;
    double sum_row = 0.0;
    double sum_col = 0.0;
    int min_row = 0, max_row = 0, min_col = 0, max_col = 0;
    int first_index = 0;  // raster index of the first pixel reached in a row-major scan
};

// Breadth-first flood fill over a plain row-major 0/1 grid.
inline std::vector<Component> flood_fill(const std::vector<std::uint8_t>& grid, int rows, int cols) {
    std::vector<std::uint8_t> seen(grid.size(), 0);
    std::vector<Component> out;
    std::vector<int> queue;
    for (int start = 0; start < rows * cols; ++start) {
        if (!grid[start] || seen[start]) continue;
        Component c;
        c.first_index = start;
        c.min_row = c.max_row = start / cols;
        c.min_col = c.max_col = start % cols;
        queue.assign(1, start);
        seen[start] = 1;
        for (std::size_t q = 0; q < queue.size(); ++q) {
            const int i = queue[q];
            const int r = i / cols, col = i % cols;
            ++c.area;
            c.sum_row += r;
            c.sum_col += col;
            c.min_row = std::min(c.min_row, r);
            c.max_row = std::max(c.max_row, r);
            c.min_col = std::min(c.min_col, col);
            c.max_col = std::max(c.max_col, col);
            const int nr[4] = {r - 1, r + 1, r, r};
            const int nc[4] = {col, col, col - 1, col + 1};
            for (int k = 0; k < 4; ++k) {
                if (nr[k] < 0 || nr[k] >= rows || nc[k] < 0 || nc[k] >= cols) continue;
                const int j = nr[k] * cols + nc[k];
                if (grid[j] && !seen[j]) {
                    seen[j] = 1;
                    queue.push_back(j);
                }
            }
        }
        out.push_back(c);
    }
    std::stable_sort(out.begin(), out.end(), [](const Component& a, const Component& b) {
        if (a.area != b.area) return a.area > b.area;
        return a.first_index < b.first_index;
    });
    return out;
}

inline std::vector<std::uint8_t> grid_of(const BinaryFrame& bf) {
    std::vector<std::uint8_t> g(static_cast<std::size_t>(bf.rows()) * bf.cols());
    for (int r = 0; r < bf.rows(); ++r) {
        for (int c = 0; c < bf.cols(); ++c) g[static_cast<std::size_t>(r) * bf.cols() + c] = bf(r, c) ? 1 : 0;
    }
    return g;
}

// Exact agreement: counts, areas, bounding boxes, ordering, and centroids equal
// to the oracle's sums divided by area.
inline bool blobs_match(const std::vector<Blob>& blobs, const std::vector<Component>& comps) {
    if (blobs.size() != comps.size()) return false;
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        const Blob& b = blobs[i];
        const Component& c = comps[i];
        if (b.area != c.area || b.min_row != c.min_row || b.max_row != c.max_row || b.min_col != c.min_col ||
            b.max_col != c.max_col) {
            return false;
        }
        if (b.centroid_x != c.sum_col / c.area || b.centroid_y != c.sum_row / c.area) return false;
    }
    return true;
}

// Random binary frame with a mix of noise and solid rectangles.
inline BinaryFrame random_binary(std::mt19937_64& rng, int rows, int cols) {
    BinaryFrame bf(rows, cols);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double density = unit(rng) * 0.6;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) bf.set(r, c, unit(rng) < density);
    }
    std::uniform_int_distribution<int> n_rects(0, 4);
    for (int k = n_rects(rng); k > 0; --k) {
        std::uniform_int_distribution<int> rr(0, rows - 1), cc(0, cols - 1);
        const int r0 = rr(rng), c0 = cc(rng);
        const int r1 = std::min(rows - 1, r0 + rr(rng) / 3), c1 = std::min(cols - 1, c0 + cc(rng) / 3);
        for (int r = r0; r <= r1; ++r) {
            for (int c = c0; c <= c1; ++c) bf.set(r, c, true);
        }
    }
    return bf;
}

}  // namespace pct::oracle
