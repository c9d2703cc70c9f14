#pragma once

#include "rsphere/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace rsphere
{

struct Curve
{
    std::vector<std::pair<double, double>> points;  // (x, y), or (theta, r) for surface plots
    std::string label;
    std::string color;  // empty: palette colour
    bool markers = false;  // draw points instead of a polyline
};

enum class Projection
{
    XY,         // plain axes
    Chart,      // unrolled chart: x = theta in [0, 2pi), y = r in [0, pi]
    Azimuthal,  // polar: radius r, angle theta
};

struct PlotStyle
{
    int width = 640;
    int height = 480;
    std::string title;
    std::string x_label;
    std::string y_label;
    Projection projection = Projection::XY;
    std::optional<std::pair<double, double>> x_range;
    std::optional<std::pair<double, double>> y_range;
};

namespace detail
{

inline const char *palette(std::size_t i)
{
    static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return colors[i % 6];
}

inline std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

inline std::string escape(const std::string &s)
{
    std::string out;
    for (char c : s)
    {
        switch (c)
        {
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        case '&':
            out += "&amp;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

} // namespace detail

/// Renders curves as a standalone SVG document. Output depends only on the input (fixed number
/// formatting, no timestamps), so identical input gives byte-identical files.
inline std::string render_svg(const std::vector<Curve> &curves, const PlotStyle &style = {})
{
    if (curves.empty())
        throw DomainError("render_svg: no curves");
    const double W = style.width;
    const double H = style.height;
    const double margin = 56.0;
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\"" << style.height
       << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    if (!style.title.empty())
        os << "<text x=\"" << detail::fmt(W / 2) << "\" y=\"20\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           << "font-size=\"14\">" << detail::escape(style.title) << "</text>\n";

    std::function<std::pair<double, double>(double, double)> map;
    if (style.projection == Projection::Azimuthal)
    {
        const double cx = W / 2;
        const double cy = H / 2 + 10;
        const double R = std::min(W, H) / 2 - margin / 2;
        map = [=](double th, double r) {
            const double rho = R * r / kPi;
            return std::pair{cx + rho * std::cos(th), cy - rho * std::sin(th)};
        };
        for (int k = 1; k <= 4; ++k)
            os << "<circle cx=\"" << detail::fmt(cx) << "\" cy=\"" << detail::fmt(cy) << "\" r=\""
               << detail::fmt(R * k / 4) << "\" fill=\"none\" stroke=\"#ccc\"/>\n";
    }
    else
    {
        double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
        if (style.projection == Projection::Chart)
        {
            x0 = 0;
            x1 = kTwoPi;
            y0 = 0;
            y1 = kPi;
        }
        else
        {
            bool first = true;
            for (const auto &c : curves)
                for (const auto &[x, y] : c.points)
                {
                    if (!std::isfinite(x) || !std::isfinite(y))
                        continue;
                    if (first)
                    {
                        x0 = x1 = x;
                        y0 = y1 = y;
                        first = false;
                    }
                    x0 = std::min(x0, x);
                    x1 = std::max(x1, x);
                    y0 = std::min(y0, y);
                    y1 = std::max(y1, y);
                }
            if (x1 - x0 < 1e-12)
                x1 = x0 + 1;
            if (y1 - y0 < 1e-12)
                y1 = y0 + 1;
        }
        if (style.x_range)
            std::tie(x0, x1) = *style.x_range;
        if (style.y_range)
            std::tie(y0, y1) = *style.y_range;
        const double pw = W - 2 * margin;
        const double ph = H - 2 * margin;
        // chart plots put r = 0 at the top, like a map with the north pole up
        const bool flip = style.projection == Projection::Chart;
        map = [=](double x, double y) {
            const double u = (y - y0) / (y1 - y0);
            return std::pair{margin + pw * (x - x0) / (x1 - x0), flip ? margin + ph * u : H - margin - ph * u};
        };
        os << "<rect x=\"" << detail::fmt(margin) << "\" y=\"" << detail::fmt(margin) << "\" width=\""
           << detail::fmt(pw) << "\" height=\"" << detail::fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        auto label = [&](double x, double y, const std::string &text, const char *anchor) {
            os << "<text x=\"" << detail::fmt(x) << "\" y=\"" << detail::fmt(y) << "\" text-anchor=\"" << anchor
               << "\" font-family=\"sans-serif\" font-size=\"11\">" << detail::escape(text) << "</text>\n";
        };
        label(margin, H - margin + 16, detail::fmt(x0), "start");
        label(W - margin, H - margin + 16, detail::fmt(x1), "end");
        label(margin - 6, flip ? margin + 4 : H - margin, detail::fmt(y0), "end");
        label(margin - 6, flip ? H - margin : margin + 4, detail::fmt(y1), "end");
        if (!style.x_label.empty())
            label(W / 2, H - 12, style.x_label, "middle");
        if (!style.y_label.empty())
            label(14, H / 2, style.y_label, "middle");
    }

    for (std::size_t i = 0; i < curves.size(); ++i)
    {
        const Curve &c = curves[i];
        const std::string color = c.color.empty() ? detail::palette(i) : c.color;
        if (c.markers)
        {
            for (const auto &[x, y] : c.points)
            {
                if (!std::isfinite(x) || !std::isfinite(y))
                    continue;
                auto [px, py] = map(style.projection == Projection::Chart ? wrap_angle(x) : x, y);
                os << "<circle cx=\"" << detail::fmt(px) << "\" cy=\"" << detail::fmt(py) << "\" r=\"1.8\" fill=\""
                   << color << "\"/>\n";
            }
            continue;
        }
        // polylines are split at theta wrap-around in chart plots and at non-finite values
        std::vector<std::vector<std::pair<double, double>>> runs(1);
        double prev_x = 0.0;
        bool have_prev = false;
        for (const auto &[x, y] : c.points)
        {
            if (!std::isfinite(x) || !std::isfinite(y))
            {
                runs.emplace_back();
                have_prev = false;
                continue;
            }
            double xx = x;
            if (style.projection == Projection::Chart)
            {
                xx = wrap_angle(x);
                if (have_prev && std::abs(xx - prev_x) > kPi)
                    runs.emplace_back();
            }
            runs.back().push_back(map(xx, y));
            prev_x = xx;
            have_prev = true;
        }
        for (const auto &run : runs)
        {
            if (run.size() < 2)
                continue;
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"";
            for (std::size_t k = 0; k < run.size(); ++k)
                os << (k ? " " : "") << detail::fmt(run[k].first) << ',' << detail::fmt(run[k].second);
            os << "\"/>\n";
        }
    }
    // legend
    double ly = 36;
    for (std::size_t i = 0; i < curves.size(); ++i)
    {
        if (curves[i].label.empty())
            continue;
        const std::string color = curves[i].color.empty() ? detail::palette(i) : curves[i].color;
        os << "<text x=\"" << detail::fmt(W - margin) << "\" y=\"" << detail::fmt(ly)
           << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"" << color << "\">"
           << detail::escape(curves[i].label) << "</text>\n";
        ly += 14;
    }
    os << "</svg>\n";
    return os.str();
}

inline void emit_svg(const std::string &path, const std::vector<Curve> &curves, const PlotStyle &style = {})
{
    const std::string doc = render_svg(curves, style);
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw Error("emit_svg: cannot open " + path);
    f << doc;
    if (!f)
        throw Error("emit_svg: write failed for " + path);
}

} // namespace rsphere
