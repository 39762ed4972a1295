#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nodebias {

// Minimal SVG 1.1 line-chart emitter for the report plots: probability on a
// fixed [0,1] y-axis against noise magnitude, averaged lines plus
// per-network scatter points.
struct PlotSeries {
    std::string label;
    std::string color = "#1f77b4";
    bool dashed = false;
    std::vector<std::pair<double, double>> line;   // averaged curve
    std::vector<std::pair<double, double>> points; // per-network scatter
};

struct PlotSpec {
    std::string title;
    std::string x_label = "noise magnitude";
    std::string y_label = "preservation probability";
    double x_max = 1.0;
    std::vector<PlotSeries> series;
};

std::string render_line_chart(const PlotSpec& spec);

// Charts arranged row-major into one document; a shared legend is drawn
// from the first chart's series labels.
std::string render_chart_grid(const std::string& title, const std::vector<PlotSpec>& charts,
                              size_t columns);

} // namespace nodebias
