// plot.hpp
// Trace CSV reading and a dependency-free SVG line plot.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oscunruh/errors.hpp"

namespace oscunruh::cli {

struct TraceTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> values;  // values[column][row]

    int column(const std::string& name) const {
        const auto it = std::find(columns.begin(), columns.end(), name);
        return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
    }
};

inline TraceTable parse_trace_csv(const std::string& text, const std::string& source = "csv") {
    std::istringstream in(text);
    std::string line;
    TraceTable table;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (table.columns.empty()) {
            table.columns = cells;
            table.values.assign(cells.size(), {});
            continue;
        }
        if (cells.size() != table.columns.size())
            throw InvalidArgument(source + ":" + std::to_string(line_no) + ": expected " +
                                  std::to_string(table.columns.size()) + " cells");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            try {
                table.values[i].push_back(std::stod(cells[i]));
            } catch (const std::logic_error&) {
                throw InvalidArgument(source + ":" + std::to_string(line_no) + ": not a number '" + cells[i] + "'");
            }
        }
    }
    if (table.columns.empty()) throw InvalidArgument(source + ": empty file");
    return table;
}

inline TraceTable read_trace_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_trace_csv(buf.str(), path);
}

// One polyline per requested column against the first column.
inline std::string render_svg(const TraceTable& table, const std::vector<std::string>& columns) {
    if (columns.empty()) throw InvalidArgument("plot: no columns requested");
    std::vector<int> idx;
    for (const auto& c : columns) {
        const int i = table.column(c);
        if (i < 0) throw InvalidArgument("plot: no column named '" + c + "'");
        idx.push_back(i);
    }
    const auto& x = table.values[0];
    if (x.empty()) throw InvalidArgument("plot: trace is empty");

    double x0 = x.front(), x1 = x.back();
    double y0 = INFINITY, y1 = -INFINITY;
    for (int i : idx)
        for (double v : table.values[i]) {
            y0 = std::min(y0, v);
            y1 = std::max(y1, v);
        }
    if (x1 == x0) x1 = x0 + 1.0;
    if (y1 - y0 < 1e-12) {
        y0 -= 0.5;
        y1 += 0.5;
    }

    constexpr double width = 720, height = 440, left = 70, right = 170, top = 30, bottom = 50;
    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double v) { return left + (v - x0) / (x1 - x0) * pw; };
    auto sy = [&](double v) { return top + (y1 - v) / (y1 - y0) * ph; };
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

    std::string svg;
    char buf[256];
    auto put = [&](const char* fmt, auto... args) {
        std::snprintf(buf, sizeof buf, fmt, args...);
        svg += buf;
    };
    put("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" viewBox=\"0 0 %.0f %.0f\">\n",
        width, height, width, height);
    put("<rect x=\"0\" y=\"0\" width=\"%.0f\" height=\"%.0f\" fill=\"white\"/>\n", width, height);
    svg += "<g stroke=\"black\" stroke-width=\"1\" fill=\"none\">\n";
    put("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"/>\n", left, top + ph, left + pw, top + ph);
    put("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\"/>\n", left, top, left, top + ph);
    svg += "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        put("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%.4g</text>\n", sx(xv), top + ph + 18, xv);
        put("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"end\">%.4g</text>\n", left - 6, sy(yv) + 4, yv);
    }
    put("<text x=\"%.2f\" y=\"%.2f\" text-anchor=\"middle\">%s</text>\n", left + pw / 2, height - 10,
        table.columns[0].c_str());
    svg += "</g>\n";
    for (std::size_t c = 0; c < idx.size(); ++c) {
        const char* color = palette[c % (sizeof palette / sizeof *palette)];
        put("<polyline fill=\"none\" stroke=\"%s\" stroke-width=\"1.5\" points=\"", color);
        const auto& y = table.values[static_cast<std::size_t>(idx[c])];
        for (std::size_t r = 0; r < y.size(); ++r) put(r ? " %.2f,%.2f" : "%.2f,%.2f", sx(x[r]), sy(y[r]));
        svg += "\"/>\n";
        const double ly = top + 16 + 18 * static_cast<double>(c);
        put("<line x1=\"%.2f\" y1=\"%.2f\" x2=\"%.2f\" y2=\"%.2f\" stroke=\"%s\" stroke-width=\"2\"/>\n",
            left + pw + 12, ly - 4, left + pw + 32, ly - 4, color);
        put("<text x=\"%.2f\" y=\"%.2f\" font-family=\"sans-serif\" font-size=\"12\">%s</text>\n", left + pw + 38, ly,
            columns[c].c_str());
    }
    svg += "</svg>\n";
    return svg;
}

// Renders first, so a failed plot never leaves a file behind.
inline void emit_plot(const std::string& csv_path, const std::vector<std::string>& columns,
                      const std::string& output_path) {
    const std::string svg = render_svg(read_trace_csv(csv_path), columns);
    std::ofstream out(output_path, std::ios::binary);
    if (!out) throw InvalidArgument("cannot write '" + output_path + "'");
    out << svg;
}

}  // namespace oscunruh::cli
