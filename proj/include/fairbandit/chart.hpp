#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fairbandit/core.hpp"

namespace fairbandit {

inline constexpr std::size_t kMaxChartPoints = 2000;

/// One polyline: cumulative regret against round.
struct ChartSeries {
    std::string label;
    std::vector<double> rounds;
    std::vector<double> regret;
};

ChartSeries series_from_trace(const RegretTrace& trace, std::string label);

/// Keeps at most `max_points` evenly spaced points, always including the first and last.
ChartSeries downsample(const ChartSeries& series, std::size_t max_points = kMaxChartPoints);

/// Static SVG line chart, one polyline per series, with axis labels and a legend.
std::string render_regret_chart(std::span<const ChartSeries> series, const std::string& title = {});
void emit_regret_chart(std::span<const ChartSeries> series, const std::filesystem::path& path,
                       const std::string& title = {});

}  // namespace fairbandit
