#pragma once

#include <string>
#include <vector>

#include "chaostune/adaptive.hpp"
#include "chaostune/simulation.hpp"
#include "chaostune/surrogate.hpp"

namespace chaostune {

// Minimal SVG line plots. Output depends only on the data: fixed canvas
// size, fixed number formatting, no timestamps.

struct PlotSeries {
    std::string label;
    std::vector<double> xs;
    std::vector<double> ys;
};

struct PlotSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<PlotSeries> series;
    int width = 800;
    int height = 500;
};

/// One <polyline> per series; non-finite points are dropped.
[[nodiscard]] std::string render_svg(const PlotSpec& spec);

[[nodiscard]] PlotSpec error_plot(const Trajectory& tr);   // e vs t
[[nodiscard]] PlotSpec phase_plot(const Trajectory& tr);   // v vs x
/// Step functions of s1 and s2 over the logged events, held until `t_end`
/// when it lies past the last event.
[[nodiscard]] PlotSpec sigmas_plot(const EventLog& log, double t_end = 0.0);
[[nodiscard]] PlotSpec rmse_plot(const TrainLog& log);     // train / test RMSE per epoch

}  // namespace chaostune
