#include "shiftest/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>

#include <fmt/format.h>

#include "shiftest/error.hpp"

namespace shiftest {
namespace {

constexpr double kWidth = 640.0;
constexpr double kHeight = 420.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 20.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::array<const char*, 6> kColours{"#1f77b4", "#d62728", "#2ca02c",
                                              "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12) lo -= 0.5, hi += 0.5;
    }
};

}  // namespace

void write_svg(const std::filesystem::path& path, const Chart& chart) {
    Range xr;
    Range yr;
    for (const auto& s : chart.series) {
        for (double v : s.x) xr.add(v);
        for (double v : s.y) yr.add(v);
    }
    if (chart.diagonal) {
        Range both = xr;
        both.add(yr.lo);
        both.add(yr.hi);
        xr = yr = both;
    }
    xr.finish();
    yr.finish();

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kTop + (1.0 - (y - yr.lo) / (yr.hi - yr.lo)) * ph; };

    std::ofstream out(path);
    if (!out) throw InputError(fmt::format("cannot write {}", path.string()));
    out << fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\">\n",
        kWidth, kHeight, kWidth, kHeight);
    out << "<!-- generated by " << kGeneratorVersion << " -->\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << fmt::format("<text x=\"{}\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">{}</text>\n",
                       kWidth / 2, escape(chart.title));
    out << fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>\n",
        kLeft, kTop, pw, ph);

    for (int k = 0; k <= 4; ++k) {
        const double xv = xr.lo + (xr.hi - xr.lo) * k / 4.0;
        const double yv = yr.lo + (yr.hi - yr.lo) * k / 4.0;
        out << fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"middle\">{:.3g}</text>\n",
            px(xv), kTop + ph + 16, xv);
        out << fmt::format(
            "<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" text-anchor=\"end\">{:.3g}</text>\n",
            kLeft - 6, py(yv) + 4, yv);
    }
    out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + pw / 2, kHeight - 10, escape(chart.x_label));
    out << fmt::format(
        "<text x=\"16\" y=\"{}\" font-size=\"12\" text-anchor=\"middle\" "
        "transform=\"rotate(-90 16 {})\">{}</text>\n",
        kTop + ph / 2, kTop + ph / 2, escape(chart.y_label));

    if (chart.diagonal)
        out << fmt::format(
            "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"gray\" "
            "stroke-dasharray=\"4 3\"/>\n",
            px(xr.lo), py(xr.lo), px(xr.hi), py(xr.hi));
    if (chart.has_vline)
        out << fmt::format(
            "<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"gray\" "
            "stroke-dasharray=\"6 4\"/>\n",
            px(chart.vline), kTop, kTop + ph);

    for (std::size_t s = 0; s < chart.series.size(); ++s) {
        const auto& series = chart.series[s];
        const char* colour = kColours[s % kColours.size()];
        const std::size_t count = std::min(series.x.size(), series.y.size());
        if (series.markers) {
            for (std::size_t i = 0; i < count; ++i)
                out << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n",
                                   px(series.x[i]), py(series.y[i]), colour);
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.3\" points=\"";
            for (std::size_t i = 0; i < count; ++i)
                out << fmt::format("{}{:.2f},{:.2f}", i ? " " : "", px(series.x[i]), py(series.y[i]));
            out << "\"/>\n";
        }
        out << fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"11\" fill=\"{}\">{}</text>\n",
                           kLeft + 8, kTop + 14 + 14 * s, colour, escape(series.label));
    }
    out << "</svg>\n";
}

}  // namespace shiftest
