#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "siattn/report.hpp"

namespace siattn {

// Minimal deterministic SVG line chart: one polyline per y series against the
// shared x series, with axis labels and per-series legend swatches.
std::string svg_line_chart(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const Series& x,
                           std::span<const Series> ys, bool log_x = false);

void write_svg(const std::string& svg, const std::filesystem::path& path);

}  // namespace siattn
