#pragma once

#include <span>
#include <string>
#include <vector>

namespace rdinv {

struct PlotSeries {
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#000000";
    bool dashed = false;
    double width = 1.5;
    std::string label;
};

struct PlotOptions {
    std::string title;
    std::string xlabel;
    std::string ylabel;
    bool log_y = false;
};

/// Writes a self-contained SVG line plot (no external dependencies); CSV is
/// the canonical artifact, this is a convenience view.
void write_svg_plot(const std::string& path, std::span<const PlotSeries> series,
                    const PlotOptions& opts);

/// Paper-order iterate palette: yellow, orange, red, light green, dark green.
const std::vector<std::string>& iterate_palette();

}  // namespace rdinv
