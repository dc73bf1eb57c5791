#include "siattn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "siattn/moments.hpp"
#include "siattn/parallel.hpp"
#include "siattn/rng.hpp"

namespace siattn {

namespace {

constexpr double kLogitCap = 700.0;

std::string describe(const LogitModel& model) {
    if (const auto* p = std::get_if<ScheduleParams>(&model))
        return "schedule(tau=" + format_double(p->tau) + ")";
    if (const auto* l = std::get_if<LogNLogits>(&model))
        return "logn(s=" + format_double(l->s) + ")";
    return "identity";
}

void append_meta(ExperimentReport& report, const std::string& key, const std::string& value) {
    report.meta.params.emplace_back(key, value);
}

// Per-sample Fig-1 metrics for one (context length, scheme) cell, computed at
// the logit level for the final query position: distances t = 1..T.
struct Fig1Cell {
    double ge_mean = 0.0, ge_se = 0.0;
    double lm_mean = 0.0, lm_se = 0.0;
    std::vector<double> re_mean, re_se;
    std::uint64_t cap_hits = 0;
};

void mean_and_se(const std::vector<double>& values, double& mean, double& se) {
    const auto n = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    mean = sum / n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    se = std::sqrt(ss / (n - 1.0) / n);
}

Fig1Cell fig1_cell(std::uint64_t length, const LogitModel& scheme, const McConfig& mc,
                   std::span<const std::uint64_t> boundaries, std::uint64_t local_window,
                   unsigned threads) {
    const RangeSpec range{1, length + 1};
    const GaussianField field(mc.seed, range_stream(range));
    const std::size_t n_ranges = boundaries.empty() ? 0 : boundaries.size() - 1;

    // Resolve the logit map once; LogN tracks the cell's context length.
    std::vector<double> mul, shift;
    double factor = 0.0;
    enum class Kind { kIdentity, kSchedule, kLogN } kind = Kind::kIdentity;
    if (const auto* params = std::get_if<ScheduleParams>(&scheme)) {
        kind = Kind::kSchedule;
        mul.resize(length);
        shift.resize(length);
        for (std::uint64_t t = 1; t <= length; ++t) {
            const SchedulePoint pt = schedule_at(t, *params);
            mul[t - 1] = pt.a;
            shift[t - 1] = pt.m;
        }
    } else if (const auto* logn = std::get_if<LogNLogits>(&scheme)) {
        kind = Kind::kLogN;
        factor = logn->s * std::log(static_cast<double>(length));
    }
    auto logit_of = [&](double g, std::uint64_t t) {
        switch (kind) {
            case Kind::kSchedule: return mul[t - 1] * g + shift[t - 1];
            case Kind::kLogN: return factor * g;
            default: return g;
        }
    };

    const std::size_t samples = mc.samples;
    std::vector<double> ge(samples), lm(samples);
    std::vector<std::vector<double>> re(n_ranges, std::vector<double>(samples));
    std::vector<std::uint32_t> caps(samples, 0);

    parallel_for(samples, threads, [&](std::size_t s0, std::size_t s1) {
        std::vector<double> rz(n_ranges), rn(n_ranges);
        for (std::size_t s = s0; s < s1; ++s) {
            double z = 0.0, neg = 0.0, local = 0.0;
            double row_max = -std::numeric_limits<double>::infinity();
            std::fill(rz.begin(), rz.end(), 0.0);
            std::fill(rn.begin(), rn.end(), 0.0);
            std::size_t b = 0;
            std::uint32_t cap = 0;
            for (std::uint64_t t = 1; t <= length; ++t) {
                double l = logit_of(field(s, t), t);
                if (l > kLogitCap) {
                    l = kLogitCap;
                    ++cap;
                } else if (l < -kLogitCap) {
                    l = -kLogitCap;
                    ++cap;
                }
                row_max = std::max(row_max, l);
                const double a = std::exp(l);
                z += a;
                neg += a * l;
                if (t <= local_window) local += a;
                while (b < n_ranges && t >= boundaries[b + 1]) ++b;
                if (b < n_ranges && t >= boundaries[b] && t < boundaries[b + 1]) {
                    rz[b] += a;
                    rn[b] += a * l;
                }
            }
            if (row_max > kShiftThreshold) {
                // Redo in the max-shifted domain; entropies and the mass ratio
                // are shift-invariant, so only the accumulators change.
                z = neg = local = 0.0;
                std::fill(rz.begin(), rz.end(), 0.0);
                std::fill(rn.begin(), rn.end(), 0.0);
                b = 0;
                for (std::uint64_t t = 1; t <= length; ++t) {
                    const double l =
                        std::clamp(logit_of(field(s, t), t), -kLogitCap, kLogitCap) - row_max;
                    const double a = std::exp(l);
                    z += a;
                    neg += a * l;
                    if (t <= local_window) local += a;
                    while (b < n_ranges && t >= boundaries[b + 1]) ++b;
                    if (b < n_ranges && t >= boundaries[b] && t < boundaries[b + 1]) {
                        rz[b] += a;
                        rn[b] += a * l;
                    }
                }
            }
            ge[s] = std::log(z) - neg / z;
            lm[s] = local / z;
            for (std::size_t r = 0; r < n_ranges; ++r)
                re[r][s] = rz[r] > 0.0 ? std::log(rz[r]) - rn[r] / rz[r] : 0.0;
            caps[s] = cap;
        }
    });

    Fig1Cell cell;
    mean_and_se(ge, cell.ge_mean, cell.ge_se);
    mean_and_se(lm, cell.lm_mean, cell.lm_se);
    cell.re_mean.resize(n_ranges);
    cell.re_se.resize(n_ranges);
    for (std::size_t r = 0; r < n_ranges; ++r) mean_and_se(re[r], cell.re_mean[r], cell.re_se[r]);
    for (std::uint32_t c : caps) cell.cap_hits += c;
    return cell;
}

}  // namespace

ExperimentReport run_theorem1(const ScheduleParams& params,
                              std::span<const std::uint64_t> deltas,
                              std::span<const std::uint64_t> t_grid, const McConfig& mc,
                              unsigned threads) {
    validate(params);
    if (t_grid.empty()) throw std::invalid_argument("run_theorem1: empty t grid");
    if (deltas.empty()) throw std::invalid_argument("run_theorem1: empty delta list");

    McConfig cell_cfg = mc;
    cell_cfg.modifier = params;  // the study is about the schedule by definition
    validate(cell_cfg);

    ExperimentReport report;
    report.kind = ReportKind::kTheorem1;
    report.meta.seed = mc.seed;
    report.meta.samples = mc.samples;
    append_meta(report, "alpha", format_double(params.alpha));
    append_meta(report, "beta", format_double(params.beta));
    append_meta(report, "tau", format_double(params.tau));

    const char* names[] = {"t",      "delta",  "z_mean", "z_se",        "z_exact",
                           "z_asymptote", "n_mean", "n_se",   "n_exact",     "n_asymptote",
                           "pass"};
    std::vector<Series> cols;
    for (const char* n : names) cols.push_back(Series{n, {}});

    for (std::uint64_t delta : deltas) {
        const double z_asym = range_asymptote(delta, params, RangeMoment::kTotal);
        const double n_asym = range_asymptote(delta, params, RangeMoment::kNegentropy);
        for (std::uint64_t t : t_grid) {
            const RangeSpec range = RangeSpec::decade(t, delta);
            double z_exact = 0.0, n_exact = 0.0;
            for (std::uint64_t u = range.t_start; u < range.t_end; ++u) {
                z_exact += expected_unnorm_attention(u, params);
                n_exact += expected_negentropy_term(u, params);
            }
            const RangeStats stats = estimate_range_stats(range, cell_cfg, threads);
            const bool pass = std::fabs(stats.z_mean - z_exact) <= 3.0 * stats.z_se &&
                              std::fabs(stats.n_mean - n_exact) <= 3.0 * stats.n_se;
            const double row[] = {static_cast<double>(t), static_cast<double>(delta),
                                  stats.z_mean, stats.z_se, z_exact, z_asym,
                                  stats.n_mean, stats.n_se, n_exact, n_asym,
                                  pass ? 1.0 : 0.0};
            for (std::size_t c = 0; c < cols.size(); ++c) cols[c].values.push_back(row[c]);
        }
    }
    report.columns = std::move(cols);
    return report;
}

ExperimentReport run_fig1(std::span<const std::uint64_t> context_lengths,
                          std::span<const LogitModel> schemes, const McConfig& mc,
                          std::span<const std::uint64_t> boundaries,
                          std::uint64_t local_window, unsigned threads) {
    if (context_lengths.empty()) throw std::invalid_argument("run_fig1: no context lengths");
    if (schemes.empty()) throw std::invalid_argument("run_fig1: no schemes");
    for (std::uint64_t length : context_lengths)
        if (length < 1) throw std::invalid_argument("run_fig1: context length must be >= 1");
    if (!boundaries.empty() && boundaries[0] == 0)
        throw std::invalid_argument("run_fig1: boundaries must be >= 1");
    for (std::size_t b = 1; b < boundaries.size(); ++b)
        if (boundaries[b] <= boundaries[b - 1])
            throw std::invalid_argument("run_fig1: boundaries must be increasing");
    if (local_window == 0) throw std::invalid_argument("run_fig1: local_window must be >= 1");
    validate(mc);

    ExperimentReport report;
    report.kind = ReportKind::kFig1;
    report.meta.seed = mc.seed;
    report.meta.samples = mc.samples;
    append_meta(report, "local_window", std::to_string(local_window));
    for (std::size_t s = 0; s < schemes.size(); ++s)
        append_meta(report, "scheme" + std::to_string(s), describe(schemes[s]));

    const std::size_t n_ranges = boundaries.empty() ? 0 : boundaries.size() - 1;
    std::vector<Series> cols;
    cols.push_back(Series{"length", {}});
    for (std::size_t s = 0; s < schemes.size(); ++s) {
        const std::string prefix =
            "s" + std::to_string(s) + "_" + logit_model_name(schemes[s]) + "_";
        cols.push_back(Series{prefix + "global_entropy_mean", {}});
        cols.push_back(Series{prefix + "global_entropy_se", {}});
        for (std::size_t r = 0; r < n_ranges; ++r) {
            const std::string tag = prefix + "range_" + std::to_string(boundaries[r]) + "_" +
                                    std::to_string(boundaries[r + 1]) + "_entropy";
            cols.push_back(Series{tag + "_mean", {}});
            cols.push_back(Series{tag + "_se", {}});
        }
        cols.push_back(Series{prefix + "local" + std::to_string(local_window) + "_mass_mean", {}});
        cols.push_back(Series{prefix + "local" + std::to_string(local_window) + "_mass_se", {}});
    }

    for (std::uint64_t length : context_lengths) {
        std::size_t c = 0;
        cols[c++].values.push_back(static_cast<double>(length));
        for (const LogitModel& scheme : schemes) {
            const Fig1Cell cell = fig1_cell(length, scheme, mc, boundaries, local_window, threads);
            cols[c++].values.push_back(cell.ge_mean);
            cols[c++].values.push_back(cell.ge_se);
            for (std::size_t r = 0; r < n_ranges; ++r) {
                cols[c++].values.push_back(cell.re_mean[r]);
                cols[c++].values.push_back(cell.re_se[r]);
            }
            cols[c++].values.push_back(cell.lm_mean);
            cols[c++].values.push_back(cell.lm_se);
        }
    }
    report.columns = std::move(cols);
    return report;
}

ExperimentReport run_fig2(const ScheduleParams& params,
                          std::span<const std::uint64_t> deltas,
                          std::span<const std::uint64_t> t_grid, const McConfig& mc,
                          unsigned threads) {
    validate(params);
    if (deltas.empty()) throw std::invalid_argument("run_fig2: empty delta list");
    if (t_grid.size() < 4) throw std::invalid_argument("run_fig2: need at least 4 grid points");

    McConfig cell_cfg = mc;
    if (std::holds_alternative<ScheduleParams>(cell_cfg.modifier)) cell_cfg.modifier = params;
    validate(cell_cfg);

    ExperimentReport report;
    report.kind = ReportKind::kFig2;
    report.meta.seed = mc.seed;
    report.meta.samples = mc.samples;
    append_meta(report, "modifier", describe(cell_cfg.modifier));
    append_meta(report, "alpha", format_double(params.alpha));
    append_meta(report, "beta", format_double(params.beta));
    append_meta(report, "tau", format_double(params.tau));

    std::vector<Series> cols = {Series{"delta", {}}, Series{"t", {}}, Series{"h_mean", {}},
                                Series{"h_se", {}}};
    for (std::uint64_t delta : deltas) {
        const ScalingFit fit = scaling_fit(t_grid, delta, cell_cfg, threads);
        for (std::size_t i = 0; i < t_grid.size(); ++i) {
            cols[0].values.push_back(static_cast<double>(delta));
            cols[1].values.push_back(static_cast<double>(t_grid[i]));
            cols[2].values.push_back(fit.h_mean[i]);
            cols[3].values.push_back(fit.h_se[i]);
        }
        const std::string tag = "fit_delta" + std::to_string(delta) + "_";
        append_meta(report, tag + "slope_logt", format_double(fit.slope_logt));
        append_meta(report, tag + "r2_logt", format_double(fit.r2_logt));
        append_meta(report, tag + "slope_sqrtlogt", format_double(fit.slope_sqrtlogt));
        append_meta(report, tag + "r2_sqrtlogt", format_double(fit.r2_sqrtlogt));
    }
    report.columns = std::move(cols);
    return report;
}

}  // namespace siattn
