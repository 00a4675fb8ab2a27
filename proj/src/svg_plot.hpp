#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace mzphase::detail {

struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string label;
    std::string color = "#1f6fb2";
    bool dashed = false;
    bool markers = true;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_x = false;
    bool log_y = false;
    std::vector<PlotSeries> series;
};

/// Writes a self-contained SVG line plot; no display server involved.
void write_svg_plot(const std::filesystem::path& path, const PlotSpec& spec);

}  // namespace mzphase::detail
