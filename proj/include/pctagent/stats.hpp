#pragma once

#include <span>
#include <string>
#include <vector>

namespace pct {

struct Summary {
    std::size_t count = 0;
    double mean = 0.0;
    double median = 0.0;
    double best = 0.0;
    double worst = 0.0;
    double std_dev = 0.0;  // population
};

// Throws std::invalid_argument on an empty sample.
Summary summarize(std::span<const double> values);

struct HistogramBin {
    double lower = 0.0;  // inclusive
    double upper = 0.0;  // exclusive
    std::size_t count = 0;
};

// Bins aligned to multiples of bin_width, spanning min..max of the sample.
std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width);

// One row per bin, bar lengths scaled so the fullest bin has `width` marks.
std::string render_histogram(std::span<const HistogramBin> bins, int width = 50);

}  // namespace pct
