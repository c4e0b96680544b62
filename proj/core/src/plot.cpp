#include "chaostune/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "chaostune/error.hpp"

namespace chaostune {

namespace {

constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};

std::string fmt(double v, const char* pattern = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof buf, pattern, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
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

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!(lo <= hi)) {
            lo = 0.0;
            hi = 1.0;
        }
        if (hi - lo < 1e-12) {
            const double pad = std::max(std::abs(lo) * 0.05, 0.5);
            lo -= pad;
            hi += pad;
        }
    }
};

}  // namespace

std::string render_svg(const PlotSpec& spec) {
    if (spec.width <= kMarginLeft + kMarginRight || spec.height <= kMarginTop + kMarginBottom) {
        throw Error(ErrorCode::InvalidArgument, "plot canvas too small");
    }
    Range xr, yr;
    for (const auto& s : spec.series) {
        if (s.xs.size() != s.ys.size()) throw Error(ErrorCode::DimensionMismatch, "series x/y lengths differ");
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (std::isfinite(s.xs[i]) && std::isfinite(s.ys[i])) {
                xr.include(s.xs[i]);
                yr.include(s.ys[i]);
            }
        }
    }
    xr.finish();
    yr.finish();

    const double pw = spec.width - kMarginLeft - kMarginRight;
    const double ph = spec.height - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto py = [&](double y) { return kMarginTop + (yr.hi - y) / (yr.hi - yr.lo) * ph; };

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(spec.width) + "\" height=\"" +
           std::to_string(spec.height) + "\" viewBox=\"0 0 " + std::to_string(spec.width) + " " +
           std::to_string(spec.height) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + std::to_string(spec.width / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">" + escape(spec.title) +
           "</text>\n";
    out += "<rect x=\"" + std::to_string(kMarginLeft) + "\" y=\"" + std::to_string(kMarginTop) + "\" width=\"" +
           fmt(pw) + "\" height=\"" + fmt(ph) + "\" fill=\"none\" stroke=\"black\"/>\n";

    for (int i = 0; i <= 4; ++i) {
        const double fx = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        const double fy = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        out += "<text x=\"" + fmt(px(fx)) + "\" y=\"" + std::to_string(spec.height - kMarginBottom + 18) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(fx, "%.4g") +
               "</text>\n";
        out += "<text x=\"" + std::to_string(kMarginLeft - 6) + "\" y=\"" + fmt(py(fy) + 4) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" + fmt(fy, "%.4g") +
               "</text>\n";
    }
    out += "<text x=\"" + fmt(kMarginLeft + pw / 2) + "\" y=\"" + std::to_string(spec.height - 10) +
           "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" + escape(spec.x_label) +
           "</text>\n";
    out += "<text x=\"16\" y=\"" + fmt(kMarginTop + ph / 2) + "\" transform=\"rotate(-90 16 " +
           fmt(kMarginTop + ph / 2) + ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
           escape(spec.y_label) + "</text>\n";

    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const auto& s = spec.series[k];
        const char* color = kPalette[k % std::size(kPalette)];
        out += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.2\" points=\"";
        bool first = true;
        for (std::size_t i = 0; i < s.xs.size(); ++i) {
            if (!std::isfinite(s.xs[i]) || !std::isfinite(s.ys[i])) continue;
            if (!first) out += ' ';
            out += fmt(px(s.xs[i])) + "," + fmt(py(s.ys[i]));
            first = false;
        }
        out += "\"/>\n";
        out += "<text x=\"" + fmt(kMarginLeft + pw - 8) + "\" y=\"" + std::to_string(kMarginTop + 16 + 16 * static_cast<int>(k)) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" fill=\"" + color + "\">" +
               escape(s.label) + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

PlotSpec error_plot(const Trajectory& tr) {
    PlotSeries s{"e", {}, {}};
    for (const auto& r : tr.rows) {
        s.xs.push_back(r.t);
        s.ys.push_back(r.e);
    }
    return {"Tracking error", "t [s]", "e = qd - x", {std::move(s)}};
}

PlotSpec phase_plot(const Trajectory& tr) {
    PlotSeries s{"(x, v)", {}, {}};
    for (const auto& r : tr.rows) {
        s.xs.push_back(r.x);
        s.ys.push_back(r.v);
    }
    return {"Phase portrait", "x", "v", {std::move(s)}};
}

PlotSpec sigmas_plot(const EventLog& log, double t_end) {
    PlotSeries a{"s1", {}, {}};
    PlotSeries b{"s2", {}, {}};
    auto push = [](PlotSeries& s, double t, double v) {
        if (!s.ys.empty()) {
            s.xs.push_back(t);
            s.ys.push_back(s.ys.back());
        }
        s.xs.push_back(t);
        s.ys.push_back(v);
    };
    for (const auto& row : log) {
        if (row.kind == EventKind::Retrain || row.kind == EventKind::NoImprovement) continue;
        push(a, row.t, row.s1);
        push(b, row.t, row.s2);
    }
    if (!a.xs.empty() && t_end > a.xs.back()) {
        a.xs.push_back(t_end);
        a.ys.push_back(a.ys.back());
        b.xs.push_back(t_end);
        b.ys.push_back(b.ys.back());
    }
    return {"Sigma updates", "t [s]", "sigma", {std::move(a), std::move(b)}};
}

PlotSpec rmse_plot(const TrainLog& log) {
    PlotSeries tr{"train RMSE", {}, {}};
    PlotSeries te{"test RMSE", {}, {}};
    for (const auto& r : log) {
        tr.xs.push_back(r.epoch);
        tr.ys.push_back(r.train_rmse);
        te.xs.push_back(r.epoch);
        te.ys.push_back(r.test_rmse);
    }
    PlotSpec spec{"Training RMSE", "epoch", "RMSE", {std::move(tr)}};
    if (std::any_of(te.ys.begin(), te.ys.end(), [](double v) { return std::isfinite(v); })) {
        spec.series.push_back(std::move(te));
    }
    return spec;
}

}  // namespace chaostune
