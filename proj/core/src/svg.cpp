#include "siattn/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace siattn {

namespace {

constexpr double kWidth = 860.0, kHeight = 520.0;
constexpr double kLeft = 70.0, kRight = 200.0, kTop = 40.0, kBottom = 55.0;

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string xml_escape(const std::string& s) {
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

}  // namespace

std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const Series& x,
                           std::span<const Series> ys, bool log_x) {
    if (x.values.empty() || ys.empty())
        throw std::invalid_argument("svg_line_chart: nothing to plot");
    for (const Series& s : ys)
        if (s.values.size() != x.values.size())
            throw std::invalid_argument("svg_line_chart: series length mismatch");

    auto xval = [&](double v) {
        if (!log_x) return v;
        if (!(v > 0.0)) throw std::invalid_argument("svg_line_chart: log axis needs x > 0");
        return std::log10(v);
    };

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (double v : x.values) {
        xmin = std::min(xmin, xval(v));
        xmax = std::max(xmax, xval(v));
    }
    for (const Series& s : ys)
        for (double v : s.values) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    if (xmax == xmin) xmax = xmin + 1.0;
    if (ymax == ymin) ymax = ymin + 1.0;

    const double pw = kWidth - kLeft - kRight;
    const double ph = kHeight - kTop - kBottom;
    auto px = [&](double v) { return kLeft + (xval(v) - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return kTop + (ymax - v) / (ymax - ymin) * ph; };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + format_double(kWidth) +
           "\" height=\"" + format_double(kHeight) + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + format_double(kLeft) + "\" y=\"24\" font-size=\"16\">" +
           xml_escape(title) + "</text>\n";

    // Axes.
    out += "<line x1=\"" + format_double(kLeft) + "\" y1=\"" + format_double(kTop) +
           "\" x2=\"" + format_double(kLeft) + "\" y2=\"" + format_double(kTop + ph) +
           "\" stroke=\"black\"/>\n";
    out += "<line x1=\"" + format_double(kLeft) + "\" y1=\"" + format_double(kTop + ph) +
           "\" x2=\"" + format_double(kLeft + pw) + "\" y2=\"" + format_double(kTop + ph) +
           "\" stroke=\"black\"/>\n";
    out += "<text x=\"" + format_double(kLeft + pw / 2) + "\" y=\"" +
           format_double(kHeight - 12.0) + "\" font-size=\"13\" text-anchor=\"middle\">" +
           xml_escape(x_label) + (log_x ? " (log scale)" : "") + "</text>\n";
    out += "<text x=\"18\" y=\"" + format_double(kTop + ph / 2) +
           "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           format_double(kTop + ph / 2) + ")\">" + xml_escape(y_label) + "</text>\n";

    // Min/max tick labels on both axes.
    out += "<text x=\"" + format_double(kLeft) + "\" y=\"" + format_double(kTop + ph + 16.0) +
           "\" font-size=\"11\">" + format_double(x.values.front()) + "</text>\n";
    out += "<text x=\"" + format_double(kLeft + pw) + "\" y=\"" +
           format_double(kTop + ph + 16.0) + "\" font-size=\"11\" text-anchor=\"end\">" +
           format_double(x.values.back()) + "</text>\n";
    out += "<text x=\"" + format_double(kLeft - 6.0) + "\" y=\"" + format_double(kTop + ph) +
           "\" font-size=\"11\" text-anchor=\"end\">" + format_double(ymin) + "</text>\n";
    out += "<text x=\"" + format_double(kLeft - 6.0) + "\" y=\"" + format_double(kTop + 10.0) +
           "\" font-size=\"11\" text-anchor=\"end\">" + format_double(ymax) + "</text>\n";

    for (std::size_t s = 0; s < ys.size(); ++s) {
        const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
        out += "<polyline fill=\"none\" stroke=\"";
        out += color;
        out += "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < x.values.size(); ++i) {
            if (i) out += ' ';
            out += format_double(px(x.values[i])) + "," + format_double(py(ys[s].values[i]));
        }
        out += "\"/>\n";
        const double ly = kTop + 16.0 * static_cast<double>(s);
        out += "<rect x=\"" + format_double(kLeft + pw + 12.0) + "\" y=\"" +
               format_double(ly) + "\" width=\"10\" height=\"10\" fill=\"";
        out += color;
        out += "\"/>\n";
        out += "<text x=\"" + format_double(kLeft + pw + 28.0) + "\" y=\"" +
               format_double(ly + 9.0) + "\" font-size=\"11\">" + xml_escape(ys[s].name) +
               "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

void write_svg(const std::string& svg, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_svg: cannot open " + path.string());
    out.write(svg.data(), static_cast<std::streamsize>(svg.size()));
    if (!out) throw std::runtime_error("write_svg: write failed for " + path.string());
}

}  // namespace siattn
