#include "pctagent/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace pct {

Summary summarize(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("cannot summarize an empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    Summary s;
    s.count = sorted.size();
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(s.count);
    const std::size_t mid = s.count / 2;
    s.median = s.count % 2 == 1 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
    s.worst = sorted.front();
    s.best = sorted.back();
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std_dev = std::sqrt(ss / static_cast<double>(s.count));
    return s;
}

std::vector<HistogramBin> histogram(std::span<const double> values, double bin_width) {
    if (!(bin_width > 0.0)) throw std::invalid_argument("histogram bin width must be positive");
    if (values.empty()) return {};
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const auto first = static_cast<long long>(std::floor(*lo_it / bin_width));
    const auto last = static_cast<long long>(std::floor(*hi_it / bin_width));
    std::vector<HistogramBin> bins;
    bins.reserve(static_cast<std::size_t>(last - first + 1));
    for (long long k = first; k <= last; ++k) {
        bins.push_back({static_cast<double>(k) * bin_width, static_cast<double>(k + 1) * bin_width, 0});
    }
    for (double v : values) {
        const auto k = static_cast<long long>(std::floor(v / bin_width));
        ++bins[static_cast<std::size_t>(k - first)].count;
    }
    return bins;
}

std::string render_histogram(std::span<const HistogramBin> bins, int width) {
    std::size_t peak = 0;
    for (const auto& b : bins) peak = std::max(peak, b.count);
    std::string out;
    char label[64];
    for (const auto& b : bins) {
        std::snprintf(label, sizeof label, "[%8g, %8g) %6zu ", b.lower, b.upper, b.count);
        out += label;
        const auto marks = peak == 0 ? 0 : static_cast<int>((b.count * static_cast<std::size_t>(width) + peak - 1) / peak);
        out.append(static_cast<std::size_t>(marks), '#');
        out += '\n';
    }
    return out;
}

}  // namespace pct
