#include "siattn/report.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace siattn {

const char* report_kind_name(ReportKind kind) {
    switch (kind) {
        case ReportKind::kTheorem1: return "theorem1";
        case ReportKind::kFig1: return "fig1";
        case ReportKind::kFig2: return "fig2";
        case ReportKind::kQq: return "qq";
    }
    return "unknown";
}

void validate(const ExperimentReport& report) {
    if (report.columns.empty())
        throw std::invalid_argument("ExperimentReport: no columns");
    const std::size_t len = report.columns.front().values.size();
    for (const Series& s : report.columns)
        if (s.values.size() != len)
            throw std::invalid_argument("ExperimentReport: series '" + s.name +
                                        "' has mismatched length");
}

std::string format_double(double value) {
    char buf[64];
    const auto res =
        std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 9);
    if (res.ec != std::errc{})
        throw std::runtime_error("format_double: conversion failed");
    return std::string(buf, res.ptr);
}

std::string to_csv(std::span<const std::pair<std::string, std::string>> meta,
                   std::span<const Series> columns) {
    std::string out;
    for (const auto& [key, value] : meta) {
        out += "# ";
        out += key;
        out += '=';
        out += value;
        out += '\n';
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (c) out += ',';
        out += columns[c].name;
    }
    out += '\n';
    const std::size_t rows = columns.empty() ? 0 : columns.front().values.size();
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < columns.size(); ++c) {
            if (c) out += ',';
            out += format_double(columns[c].values[r]);
        }
        out += '\n';
    }
    return out;
}

std::string to_csv(const ExperimentReport& report) {
    validate(report);
    std::vector<std::pair<std::string, std::string>> meta;
    meta.emplace_back("kind", report_kind_name(report.kind));
    meta.emplace_back("seed", std::to_string(report.meta.seed));
    meta.emplace_back("samples", std::to_string(report.meta.samples));
    meta.insert(meta.end(), report.meta.params.begin(), report.meta.params.end());
    return to_csv(meta, report.columns);
}

void write_csv(const ExperimentReport& report, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path.string());
    const std::string text = to_csv(report);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("write_csv: write failed for " + path.string());
}

}  // namespace siattn
