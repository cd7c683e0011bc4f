#include "fairbandit/chart.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace fairbandit {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string escape_xml(const std::string& text) {
    std::string out;
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

std::string tick_label(double v) {
    char buf[32];
    if (std::abs(v) >= 1e4) {
        std::snprintf(buf, sizeof buf, "%.3g", v);
    } else {
        std::snprintf(buf, sizeof buf, "%g", std::round(v * 100.0) / 100.0);
    }
    return buf;
}

}  // namespace

ChartSeries series_from_trace(const RegretTrace& trace, std::string label) {
    ChartSeries s{std::move(label), {}, {}};
    s.rounds.reserve(trace.size() + 1);
    s.regret.reserve(trace.size() + 1);
    s.rounds.push_back(0.0);
    s.regret.push_back(0.0);
    for (const auto& r : trace.records()) {
        s.rounds.push_back(static_cast<double>(r.t));
        s.regret.push_back(r.cum_regret);
    }
    return s;
}

ChartSeries downsample(const ChartSeries& series, std::size_t max_points) {
    const std::size_t n = series.rounds.size();
    if (n <= max_points || max_points < 2) return series;
    ChartSeries out{series.label, {}, {}};
    out.rounds.reserve(max_points);
    out.regret.reserve(max_points);
    for (std::size_t i = 0; i < max_points; ++i) {
        const auto idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * static_cast<double>(n - 1) / static_cast<double>(max_points - 1)));
        out.rounds.push_back(series.rounds[idx]);
        out.regret.push_back(series.regret[idx]);
    }
    return out;
}

std::string render_regret_chart(std::span<const ChartSeries> series, const std::string& title) {
    if (series.empty()) throw Error(ErrorCode::InvalidArgument, "chart needs at least one series");

    std::vector<ChartSeries> reduced;
    reduced.reserve(series.size());
    double x_max = 1.0;
    double y_min = 0.0;
    double y_max = 0.0;
    for (const auto& s : series) {
        if (s.rounds.size() != s.regret.size()) throw Error(ErrorCode::DimensionMismatch, "series length mismatch");
        reduced.push_back(downsample(s));
        for (double x : s.rounds) x_max = std::max(x_max, x);
        for (double y : s.regret) {
            y_min = std::min(y_min, y);
            y_max = std::max(y_max, y);
        }
    }
    if (y_max - y_min < 1e-9) y_max = y_min + 1.0;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + plot_w * x / x_max; };
    auto py = [&](double y) { return kTop + plot_h * (1.0 - (y - y_min) / (y_max - y_min)); };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!title.empty()) {
        svg << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
            << escape_xml(title) << "</text>\n";
    }

    // axes and ticks
    svg << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(kLeft + plot_w)
        << "\" y2=\"" << fmt(kTop + plot_h) << "\"/>\n";
    svg << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
        << fmt(kTop + plot_h) << "\"/>\n";
    svg << "</g>\n<g class=\"ticks\">\n";
    for (int i = 0; i <= 5; ++i) {
        const double xv = x_max * i / 5.0;
        const double yv = y_min + (y_max - y_min) * i / 5.0;
        svg << "<line x1=\"" << fmt(px(xv)) << "\" y1=\"" << fmt(kTop + plot_h) << "\" x2=\"" << fmt(px(xv))
            << "\" y2=\"" << fmt(kTop + plot_h + 5) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(kTop + plot_h + 18)
            << "\" text-anchor=\"middle\">" << tick_label(xv) << "</text>\n";
        svg << "<line x1=\"" << fmt(kLeft - 5) << "\" y1=\"" << fmt(py(yv)) << "\" x2=\"" << fmt(kLeft)
            << "\" y2=\"" << fmt(py(yv)) << "\" stroke=\"black\"/>\n";
        svg << "<text x=\"" << fmt(kLeft - 8) << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">"
            << tick_label(yv) << "</text>\n";
    }
    svg << "</g>\n";
    svg << "<text class=\"x-label\" x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(kHeight - 15)
        << "\" text-anchor=\"middle\">round t</text>\n";
    svg << "<text class=\"y-label\" x=\"18\" y=\"" << fmt(kTop + plot_h / 2)
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << fmt(kTop + plot_h / 2)
        << ")\">cumulative regret</text>\n";

    for (std::size_t i = 0; i < reduced.size(); ++i) {
        const auto& s = reduced[i];
        const char* color = kPalette[i % kPalette.size()];
        svg << "<polyline class=\"series\" data-label=\"" << escape_xml(s.label) << "\" fill=\"none\" stroke=\""
            << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t p = 0; p < s.rounds.size(); ++p) {
            svg << (p ? " " : "") << fmt(px(s.rounds[p])) << ',' << fmt(py(s.regret[p]));
        }
        svg << "\"/>\n";
    }

    svg << "<g class=\"legend\">\n";
    for (std::size_t i = 0; i < reduced.size(); ++i) {
        const double y = kTop + 10 + 20.0 * static_cast<double>(i);
        const double x = kLeft + plot_w + 15;
        svg << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(x + 25) << "\" y2=\"" << fmt(y)
            << "\" stroke=\"" << kPalette[i % kPalette.size()] << "\" stroke-width=\"2\"/>\n";
        svg << "<text class=\"legend-entry\" x=\"" << fmt(x + 32) << "\" y=\"" << fmt(y + 4) << "\">"
            << escape_xml(reduced[i].label) << "</text>\n";
    }
    svg << "</g>\n</svg>\n";
    return svg.str();
}

void emit_regret_chart(std::span<const ChartSeries> series, const std::filesystem::path& path,
                       const std::string& title) {
    const std::string svg = render_regret_chart(series, title);
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
    out << svg;
    if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace fairbandit
