#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace shiftest {

inline constexpr const char* kGeneratorVersion = "shiftest 1.0.0";

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = false;  // draw points instead of a polyline
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    /// Optional vertical reference line.
    double vline = 0.0;
    bool has_vline = false;
    /// Draw y = x across the plot.
    bool diagonal = false;
};

/// Static SVG rendering; the only non-data content is the generator comment.
void write_svg(const std::filesystem::path& path, const Chart& chart);

}  // namespace shiftest
