#pragma once

// Spacetime diagrams: position across, time upwards. Worldlines are exact
// polylines since particles move freely between logged events.

#include "relbill/simulator.hpp"

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

namespace relbill {

struct SpacetimePoint {
    double t = 0;
    double x = 0;
};

struct Worldlines {
    std::vector<std::vector<SpacetimePoint>> lines;  // one per particle, in log order
    std::vector<SpacetimePoint> events;
    std::vector<bool> tachyonic;
};

/// Vertices of every worldline: the initial position, each collision the
/// particle takes part in, and the final position.
template <Scalar Real>
Worldlines worldlines(const BilliardState<Real>& initial, const EventLog<Real>& log, const BilliardState<Real>& final_state) {
    Worldlines w;
    const std::size_t n = initial.particles.size();
    if (final_state.particles.size() != n) throw Error(ErrorKind::Validation, "render: particle count mismatch");
    w.lines.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        w.lines[i].push_back({to_double(initial.t), to_double(initial.particles[i].x)});
    }
    for (const auto& e : log) {
        if (e.left + 1 >= n) throw Error(ErrorKind::Validation, "render: event outside the particle range");
        const SpacetimePoint pt{to_double(e.t), to_double(e.x)};
        w.lines[e.left].push_back(pt);
        w.lines[e.left + 1].push_back(pt);
        w.events.push_back(pt);
        w.tachyonic.push_back(e.tachyonic);
    }
    for (std::size_t i = 0; i < n; ++i) {
        const SpacetimePoint last{to_double(final_state.t), to_double(final_state.particles[i].x)};
        const auto& back = w.lines[i].back();
        if (back.t != last.t || back.x != last.x) w.lines[i].push_back(last);
    }
    return w;
}

namespace detail {

inline std::string svg_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s(buf);
    if (s == "-0.000") s = "0.000";
    return s;
}

}  // namespace detail

/// Deterministic SVG: same worldlines, same bytes. Tachyonic collisions are
/// drawn as red rings, other collisions as small black dots.
inline std::string render_svg(const Worldlines& w, const std::string& title = "") {
    constexpr double width = 800, height = 800, margin = 50;
    double tmin = 0, tmax = 0, xmin = 0, xmax = 0;
    bool first = true;
    for (const auto& line : w.lines) {
        for (const auto& p : line) {
            if (first) {
                tmin = tmax = p.t;
                xmin = xmax = p.x;
                first = false;
            }
            tmin = std::min(tmin, p.t);
            tmax = std::max(tmax, p.t);
            xmin = std::min(xmin, p.x);
            xmax = std::max(xmax, p.x);
        }
    }
    if (tmax == tmin) tmax = tmin + 1;
    if (xmax == xmin) {
        xmin -= 1;
        xmax += 1;
    }
    auto px = [&](double x) { return margin + (x - xmin) / (xmax - xmin) * (width - 2 * margin); };
    auto py = [&](double t) { return height - margin - (t - tmin) / (tmax - tmin) * (height - 2 * margin); };

    static const char* const palette[] = {"#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\"0 0 800 800\">\n";
    out += "<rect width=\"800\" height=\"800\" fill=\"white\"/>\n";
    if (!title.empty()) out += "<text x=\"50\" y=\"30\" font-family=\"monospace\" font-size=\"14\">" + title + "</text>\n";
    out += "<line x1=\"50\" y1=\"750\" x2=\"750\" y2=\"750\" stroke=\"#999\"/>\n";
    out += "<line x1=\"50\" y1=\"750\" x2=\"50\" y2=\"50\" stroke=\"#999\"/>\n";
    out += "<text x=\"755\" y=\"765\" font-family=\"monospace\" font-size=\"12\">x</text>\n";
    out += "<text x=\"40\" y=\"45\" font-family=\"monospace\" font-size=\"12\">t</text>\n";
    out += "<text x=\"50\" y=\"770\" font-family=\"monospace\" font-size=\"10\">x in [" + detail::svg_number(xmin) + ", " +
           detail::svg_number(xmax) + "], t in [" + detail::svg_number(tmin) + ", " + detail::svg_number(tmax) +
           "]</text>\n";
    for (std::size_t i = 0; i < w.lines.size(); ++i) {
        out += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"";
        out += palette[i % (sizeof palette / sizeof palette[0])];
        out += "\" points=\"";
        for (std::size_t k = 0; k < w.lines[i].size(); ++k) {
            if (k) out += ' ';
            out += detail::svg_number(px(w.lines[i][k].x)) + "," + detail::svg_number(py(w.lines[i][k].t));
        }
        out += "\"/>\n";
    }
    for (std::size_t k = 0; k < w.events.size(); ++k) {
        const auto cx = detail::svg_number(px(w.events[k].x));
        const auto cy = detail::svg_number(py(w.events[k].t));
        if (w.tachyonic[k]) {
            out += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"4\" fill=\"none\" stroke=\"red\" stroke-width=\"1.5\"/>\n";
        } else {
            out += "<circle cx=\"" + cx + "\" cy=\"" + cy + "\" r=\"2\" fill=\"black\"/>\n";
        }
    }
    out += "</svg>\n";
    return out;
}

}  // namespace relbill
