#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace siattn {

struct Series {
    std::string name;
    std::vector<double> values;
};

enum class ReportKind { kTheorem1, kFig1, kFig2, kQq };
const char* report_kind_name(ReportKind kind);

struct ReportMeta {
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    // Ordered key=value provenance (hyperparameters, grids, fit results...).
    std::vector<std::pair<std::string, std::string>> params;
    // Informational only; deliberately left out of the CSV so that identical
    // inputs serialise to identical bytes.
    std::string timestamp;
};

struct ExperimentReport {
    ReportKind kind = ReportKind::kTheorem1;
    std::vector<Series> columns;
    ReportMeta meta;
};
void validate(const ExperimentReport& report);

// Shortest-round-trip-style rendering with 9 significant digits and a '.'
// decimal separator regardless of locale.
std::string format_double(double value);

// CSV with '#'-prefixed key=value metadata lines above the header row.
std::string to_csv(std::span<const std::pair<std::string, std::string>> meta,
                   std::span<const Series> columns);
std::string to_csv(const ExperimentReport& report);
void write_csv(const ExperimentReport& report, const std::filesystem::path& path);

}  // namespace siattn
