#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

namespace epirl {

struct SvgSeries {
    std::string name;
    std::vector<std::pair<double, double>> points; // (x, y)
    double opacity = 1.0;
    double width = 1.5;
};

namespace detail {

inline std::string svg_num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
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

inline const char* svg_color(std::size_t k) {
    static constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                               "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
    return kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
}

struct SvgFrame {
    // 800x500 viewport with fixed margins around the plot area.
    static constexpr double kW = 800, kH = 500;
    static constexpr double kLeft = 70, kRight = 780, kTop = 45, kBottom = 450;
    double x_min = 0, x_max = 1, y_min = 0, y_max = 1;

    double px(double x) const { return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft); }
    double py(double y) const {
        return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop);
    }
};

inline void svg_open(std::string& out) {
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"500\" "
           "viewBox=\"0 0 800 500\" font-family=\"sans-serif\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";
}

inline void svg_title_and_axes(std::string& out, const SvgFrame& f, const std::string& title,
                               const std::string& x_label, const std::string& y_label,
                               bool x_ticks = true) {
    out += "<text x=\"400\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
           xml_escape(title) + "</text>\n";
    // Axis lines.
    out += "<line x1=\"" + svg_num(SvgFrame::kLeft) + "\" y1=\"" + svg_num(SvgFrame::kBottom) +
           "\" x2=\"" + svg_num(SvgFrame::kRight) + "\" y2=\"" + svg_num(SvgFrame::kBottom) +
           "\" stroke=\"#000000\"/>\n";
    out += "<line x1=\"" + svg_num(SvgFrame::kLeft) + "\" y1=\"" + svg_num(SvgFrame::kTop) +
           "\" x2=\"" + svg_num(SvgFrame::kLeft) + "\" y2=\"" + svg_num(SvgFrame::kBottom) +
           "\" stroke=\"#000000\"/>\n";
    // Ticks: 5 per axis.
    for (int k = 0; k <= 4; ++k) {
        const double fx = f.x_min + (f.x_max - f.x_min) * k / 4.0;
        const double fy = f.y_min + (f.y_max - f.y_min) * k / 4.0;
        const double px = f.px(fx), py = f.py(fy);
        if (x_ticks) {
            out += "<line x1=\"" + svg_num(px) + "\" y1=\"" + svg_num(SvgFrame::kBottom) +
                   "\" x2=\"" + svg_num(px) + "\" y2=\"" + svg_num(SvgFrame::kBottom + 5) +
                   "\" stroke=\"#000000\"/>\n";
            out += "<text x=\"" + svg_num(px) + "\" y=\"" + svg_num(SvgFrame::kBottom + 20) +
                   "\" text-anchor=\"middle\" font-size=\"11\">" + svg_num(fx) + "</text>\n";
        }
        out += "<line x1=\"" + svg_num(SvgFrame::kLeft - 5) + "\" y1=\"" + svg_num(py) +
               "\" x2=\"" + svg_num(SvgFrame::kLeft) + "\" y2=\"" + svg_num(py) +
               "\" stroke=\"#000000\"/>\n";
        out += "<text x=\"" + svg_num(SvgFrame::kLeft - 8) + "\" y=\"" + svg_num(py + 4) +
               "\" text-anchor=\"end\" font-size=\"11\">" + svg_num(fy) + "</text>\n";
    }
    out += "<text x=\"" + svg_num((SvgFrame::kLeft + SvgFrame::kRight) / 2) +
           "\" y=\"488\" text-anchor=\"middle\" font-size=\"13\">" + xml_escape(x_label) +
           "</text>\n";
    out += "<text x=\"16\" y=\"" + svg_num((SvgFrame::kTop + SvgFrame::kBottom) / 2) +
           "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 " +
           svg_num((SvgFrame::kTop + SvgFrame::kBottom) / 2) + ")\">" + xml_escape(y_label) +
           "</text>\n";
}

inline void svg_legend(std::string& out, const std::vector<std::string>& names,
                       const std::vector<std::size_t>& colors) {
    const double x = SvgFrame::kRight - 150, y0 = SvgFrame::kTop + 10;
    for (std::size_t k = 0; k < names.size(); ++k) {
        const double y = y0 + 18.0 * static_cast<double>(k);
        out += "<line x1=\"" + svg_num(x) + "\" y1=\"" + svg_num(y - 4) + "\" x2=\"" +
               svg_num(x + 24) + "\" y2=\"" + svg_num(y - 4) + "\" stroke=\"" +
               svg_color(colors[k]) + "\" stroke-width=\"3\"/>\n";
        out += "<text x=\"" + svg_num(x + 30) + "\" y=\"" + svg_num(y) + "\" font-size=\"12\">" +
               xml_escape(names[k]) + "</text>\n";
    }
}

} // namespace detail

/// Minimal line chart: 800x500, one polyline per series, embedded legend.
/// Series named "" are drawn but omitted from the legend (e.g. per-run
/// ensemble traces behind a mean curve, sharing the previous named color).
inline std::string svg_line_chart(const std::string& title, const std::string& x_label,
                                  const std::string& y_label,
                                  const std::vector<SvgSeries>& series) {
    detail::SvgFrame frame;
    bool any = false;
    for (const auto& s : series)
        for (const auto& [x, y] : s.points) {
            if (!any) {
                frame.x_min = frame.x_max = x;
                frame.y_min = frame.y_max = y;
                any = true;
            }
            frame.x_min = std::min(frame.x_min, x);
            frame.x_max = std::max(frame.x_max, x);
            frame.y_min = std::min(frame.y_min, y);
            frame.y_max = std::max(frame.y_max, y);
        }
    if (!any) {
        frame.x_min = frame.y_min = 0;
        frame.x_max = frame.y_max = 1;
    }
    if (frame.x_max == frame.x_min) frame.x_max = frame.x_min + 1;
    if (frame.y_max == frame.y_min) frame.y_max = frame.y_min + 1;
    // Headroom so curves don't sit on the frame.
    const double pad = 0.04 * (frame.y_max - frame.y_min);
    frame.y_min -= pad;
    frame.y_max += pad;

    std::string out;
    detail::svg_open(out);
    detail::svg_title_and_axes(out, frame, title, x_label, y_label);

    std::vector<std::string> legend_names;
    std::vector<std::size_t> legend_colors;
    std::size_t color = 0;
    bool color_started = false;
    for (const auto& s : series) {
        if (!s.name.empty()) {
            color = color_started ? color + 1 : 0;
            color_started = true;
            legend_names.push_back(s.name);
            legend_colors.push_back(color);
        }
        if (s.points.empty()) continue;
        out += "<polyline fill=\"none\" stroke=\"" + std::string(detail::svg_color(color)) +
               "\" stroke-width=\"" + detail::svg_num(s.width) + "\"";
        if (s.opacity < 1.0) out += " stroke-opacity=\"" + detail::svg_num(s.opacity) + "\"";
        out += " points=\"";
        for (std::size_t k = 0; k < s.points.size(); ++k) {
            if (k) out += ' ';
            out += detail::svg_num(frame.px(s.points[k].first)) + "," +
                   detail::svg_num(frame.py(s.points[k].second));
        }
        out += "\"/>\n";
    }
    detail::svg_legend(out, legend_names, legend_colors);
    out += "</svg>\n";
    return out;
}

struct SvgBarGroup {
    std::string label;
    std::vector<double> values; // parallel to the series-name list
};

/// Grouped bar chart (e.g. action percentages per policy); same frame and
/// legend conventions as the line chart.
inline std::string svg_bar_chart(const std::string& title, const std::string& y_label,
                                 const std::vector<std::string>& series_names,
                                 const std::vector<SvgBarGroup>& groups) {
    detail::SvgFrame frame;
    frame.x_min = 0;
    frame.x_max = static_cast<double>(groups.empty() ? 1 : groups.size());
    frame.y_min = 0;
    frame.y_max = 1;
    for (const auto& g : groups)
        for (double v : g.values) {
            frame.y_min = std::min(frame.y_min, v);
            frame.y_max = std::max(frame.y_max, v);
        }
    if (frame.y_max == frame.y_min) frame.y_max = frame.y_min + 1;
    frame.y_max += 0.05 * (frame.y_max - frame.y_min);

    std::string out;
    detail::svg_open(out);
    detail::svg_title_and_axes(out, frame, title, "", y_label, /*x_ticks=*/false);

    const double group_w = (detail::SvgFrame::kRight - detail::SvgFrame::kLeft) /
                           std::max<std::size_t>(1, groups.size());
    const std::size_t n_series = series_names.size();
    const double slot = group_w / (static_cast<double>(n_series) + 1.0);
    const double y0 = frame.py(std::max(0.0, frame.y_min));
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double gx = detail::SvgFrame::kLeft + group_w * static_cast<double>(g);
        for (std::size_t s = 0; s < n_series && s < groups[g].values.size(); ++s) {
            const double v = groups[g].values[s];
            const double x = gx + slot * (0.5 + static_cast<double>(s));
            const double y = frame.py(v);
            const double top = std::min(y, y0), h = std::abs(y0 - y);
            out += "<rect x=\"" + detail::svg_num(x) + "\" y=\"" + detail::svg_num(top) +
                   "\" width=\"" + detail::svg_num(slot * 0.9) + "\" height=\"" +
                   detail::svg_num(h) + "\" fill=\"" + detail::svg_color(s) + "\"/>\n";
        }
        out += "<text x=\"" + detail::svg_num(gx + group_w / 2) + "\" y=\"" +
               detail::svg_num(detail::SvgFrame::kBottom + 34) +
               "\" text-anchor=\"middle\" font-size=\"12\">" + detail::xml_escape(groups[g].label) +
               "</text>\n";
    }
    std::vector<std::size_t> colors(n_series);
    for (std::size_t s = 0; s < n_series; ++s) colors[s] = s;
    detail::svg_legend(out, series_names, colors);
    out += "</svg>\n";
    return out;
}

} // namespace epirl
