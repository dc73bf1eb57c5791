#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "siattn/schedule.hpp"
#include "siattn/tensor.hpp"

namespace siattn {

// Token-distance range [t_start, t_end); decade(t, delta) gives [t, t*delta).
struct RangeSpec {
    std::uint64_t t_start = 1;
    std::uint64_t t_end = 2;

    static RangeSpec decade(std::uint64_t t, std::uint64_t delta);
    std::uint64_t width() const { return t_end - t_start; }
};
void validate(const RangeSpec& range);

// How raw N(0,1) base logits are turned into attention logits.
struct IdentityLogits {};
struct LogNLogits {
    double s = 0.4;
    std::uint64_t n = 1;  // the context length entering s*ln(n)
};
using LogitModel = std::variant<IdentityLogits, ScheduleParams, LogNLogits>;

struct McConfig {
    std::uint64_t samples = 2;  // independent sequence draws, >= 2
    std::uint64_t seed = 0;
    LogitModel modifier = IdentityLogits{};
};
void validate(const McConfig& cfg);

// Monte Carlo estimates (mean +/- standard error) of the range statistics
// Z = sum exp(L), N~ = sum exp(L)*L and the in-range entropy H.
struct RangeStats {
    double z_mean = 0.0, z_se = 0.0;
    double n_mean = 0.0, n_se = 0.0;
    double h_mean = 0.0, h_se = 0.0;
    // Number of draws whose logit magnitude hit the exp cap; nonzero flags
    // the run as having clipped tails (identity/LogN arms only in practice).
    std::uint64_t cap_hits = 0;
};

// IID standard-normal base logits, [samples x width], bit-reproducible for a
// given (seed, range) no matter how evaluation is parallelised or ordered.
Tensor sample_base_logits(const RangeSpec& range, const McConfig& cfg);

// Entropy of the normalised distribution w / sum(w); all entries must be > 0.
double entropy_of_weights(std::span<const double> unnorm_weights);

// Applies cfg.modifier to base logits, exponentiates and reduces to Z, N~, H.
// threads = 0 means hardware concurrency; the result is thread-count invariant.
RangeStats estimate_range_stats(const RangeSpec& range, const McConfig& cfg,
                                unsigned threads = 0);

// Ordinary least squares of y on x. If y is constant the fit is degenerate
// and r2 is reported as 0 by convention.
struct OlsFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};
OlsFit fit_ols(std::span<const double> x, std::span<const double> y);

// Fits mean range entropy against ln(t) and sqrt(ln(t)) over a grid of range
// starts, each range being [t, t*delta).
struct ScalingFit {
    double slope_logt = 0.0, r2_logt = 0.0;
    double slope_sqrtlogt = 0.0, r2_sqrtlogt = 0.0;
    std::vector<double> h_mean;  // per-grid-point estimates the fit used
    std::vector<double> h_se;
};
ScalingFit scaling_fit(std::span<const std::uint64_t> t_grid, std::uint64_t delta,
                       const McConfig& cfg, unsigned threads = 0);

// QQ points against the standard normal at plotting positions (i - 0.5) / n.
struct QqPoint {
    double theoretical = 0.0;
    double empirical = 0.0;
};
std::vector<QqPoint> qq_points(std::span<const double> sample, std::size_t n_quantiles);

// Stable short name for a logit model ("identity" | "schedule" | "logn").
const char* logit_model_name(const LogitModel& model);

// RNG stream id assigned to a range, exposed so other estimators can share
// the deterministic base-logit field of sample_base_logits.
std::uint32_t range_stream(const RangeSpec& range);

}  // namespace siattn
