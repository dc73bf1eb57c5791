#include "siattn/mclab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "siattn/online_softmax.hpp"
#include "siattn/parallel.hpp"
#include "siattn/rng.hpp"

namespace siattn {

namespace {

// Per-logit magnitude cap before exponentiation; hitting it flags the run.
constexpr double kLogitCap = 700.0;

struct SampleReduction {
    double z = 0.0;
    double n = 0.0;
    double h = 0.0;
    std::uint32_t caps = 0;
};

// Streams one sample row through the logit model. logit_of(g, idx) maps the
// base draw at offset idx within the range to the modified logit. Z and N~
// accumulate directly in double; the entropy goes through the max-shifted
// online accumulator so it stays finite even where Z would overflow.
template <typename LogitOf>
SampleReduction reduce_sample(const GaussianField& field, const RangeSpec& range,
                              std::uint64_t sample, LogitOf&& logit_of) {
    SampleReduction out;
    OnlineSoftmax softmax;
    std::uint64_t idx = 0;
    for (std::uint64_t t = range.t_start; t < range.t_end; ++t, ++idx) {
        double l = logit_of(field(sample, t), idx);
        if (l > kLogitCap) {
            l = kLogitCap;
            ++out.caps;
        } else if (l < -kLogitCap) {
            l = -kLogitCap;
            ++out.caps;
        }
        const double a = std::exp(l);
        out.z += a;
        out.n += a * l;
        softmax.add(l);
    }
    out.h = softmax.entropy();
    return out;
}

void mean_and_se(const std::vector<double>& values, double& mean, double& se) {
    const std::size_t n = values.size();
    double sum = 0.0;
    for (double v : values) sum += v;
    mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (double v : values) {
        const double d = v - mean;
        ss += d * d;
    }
    const double var = ss / static_cast<double>(n - 1);
    se = std::sqrt(var / static_cast<double>(n));
}

}  // namespace

RangeSpec RangeSpec::decade(std::uint64_t t, std::uint64_t delta) {
    if (delta < 2) throw std::invalid_argument("RangeSpec::decade: delta must be >= 2");
    RangeSpec r{t, t * delta};
    validate(r);
    return r;
}

void validate(const RangeSpec& range) {
    if (range.t_start < 1 || range.t_start >= range.t_end)
        throw std::invalid_argument("RangeSpec: need 1 <= t_start < t_end");
}

void validate(const McConfig& cfg) {
    if (cfg.samples < 2)
        throw std::invalid_argument("McConfig: standard errors need samples >= 2");
    std::visit(
        [](const auto& model) {
            using T = std::decay_t<decltype(model)>;
            if constexpr (std::is_same_v<T, ScheduleParams>) {
                validate(model);
            } else if constexpr (std::is_same_v<T, LogNLogits>) {
                if (model.n < 1) throw std::invalid_argument("LogNLogits: n must be >= 1");
                if (!std::isfinite(model.s))
                    throw std::invalid_argument("LogNLogits: s must be finite");
            }
        },
        cfg.modifier);
}

std::uint32_t range_stream(const RangeSpec& range) {
    const std::uint64_t h = mix64(range.t_start ^ mix64(range.t_end));
    return static_cast<std::uint32_t>(h ^ (h >> 32));
}

const char* logit_model_name(const LogitModel& model) {
    if (std::holds_alternative<IdentityLogits>(model)) return "identity";
    if (std::holds_alternative<ScheduleParams>(model)) return "schedule";
    return "logn";
}

Tensor sample_base_logits(const RangeSpec& range, const McConfig& cfg) {
    validate(range);
    validate(cfg);
    const std::uint64_t w = range.width();
    Tensor out = Tensor::zeros({static_cast<std::size_t>(cfg.samples), static_cast<std::size_t>(w)});
    const GaussianField field(cfg.seed, range_stream(range));
    parallel_for(cfg.samples, 0, [&](std::size_t s0, std::size_t s1) {
        for (std::size_t s = s0; s < s1; ++s) {
            double* row = out.data.data() + s * w;
            std::uint64_t idx = 0;
            for (std::uint64_t t = range.t_start; t < range.t_end; ++t, ++idx)
                row[idx] = field(s, t);
        }
    });
    return out;
}

double entropy_of_weights(std::span<const double> unnorm_weights) {
    if (unnorm_weights.empty())
        throw std::invalid_argument("entropy_of_weights: empty weight vector");
    double wmax = 0.0;
    for (double w : unnorm_weights) {
        if (!(w > 0.0) || !std::isfinite(w))
            throw std::invalid_argument("entropy_of_weights: weights must be positive finite");
        wmax = std::max(wmax, w);
    }
    double z = 0.0;
    for (double w : unnorm_weights) z += w / wmax;
    double h = 0.0;
    for (double w : unnorm_weights) {
        const double p = (w / wmax) / z;
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

RangeStats estimate_range_stats(const RangeSpec& range, const McConfig& cfg, unsigned threads) {
    validate(range);
    validate(cfg);
    const std::uint64_t w = range.width();
    const std::uint64_t samples = cfg.samples;
    const GaussianField field(cfg.seed, range_stream(range));

    std::vector<double> z(samples), n(samples), h(samples);
    std::vector<std::uint32_t> caps(samples, 0);

    auto run = [&](auto&& logit_of) {
        parallel_for(samples, threads, [&](std::size_t s0, std::size_t s1) {
            for (std::size_t s = s0; s < s1; ++s) {
                const SampleReduction r = reduce_sample(field, range, s, logit_of);
                z[s] = r.z;
                n[s] = r.n;
                h[s] = r.h;
                caps[s] = r.caps;
            }
        });
    };

    if (const auto* params = std::get_if<ScheduleParams>(&cfg.modifier)) {
        // Precompute (a_t, m_t) once for the whole range.
        std::vector<double> mul(w), shift(w);
        for (std::uint64_t idx = 0; idx < w; ++idx) {
            const SchedulePoint pt = schedule_at(range.t_start + idx, *params);
            mul[idx] = pt.a;
            shift[idx] = pt.m;
        }
        run([&](double g, std::uint64_t idx) { return mul[idx] * g + shift[idx]; });
    } else if (const auto* logn = std::get_if<LogNLogits>(&cfg.modifier)) {
        const double factor = logn->s * std::log(static_cast<double>(logn->n));
        run([factor](double g, std::uint64_t) { return factor * g; });
    } else {
        run([](double g, std::uint64_t) { return g; });
    }

    RangeStats stats;
    mean_and_se(z, stats.z_mean, stats.z_se);
    mean_and_se(n, stats.n_mean, stats.n_se);
    mean_and_se(h, stats.h_mean, stats.h_se);
    for (std::uint32_t c : caps) stats.cap_hits += c;
    return stats;
}

OlsFit fit_ols(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("fit_ols: need at least two (x, y) pairs");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0)
        throw std::invalid_argument("fit_ols: regressor has fewer than 2 distinct values");
    OlsFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    if (syy > 0.0) {
        double ss_res = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r = y[i] - (fit.intercept + fit.slope * x[i]);
            ss_res += r * r;
        }
        fit.r2 = 1.0 - ss_res / syy;
    } else {
        fit.r2 = 0.0;  // constant response: R^2 undefined, reported as 0
    }
    return fit;
}

ScalingFit scaling_fit(std::span<const std::uint64_t> t_grid, std::uint64_t delta,
                       const McConfig& cfg, unsigned threads) {
    if (t_grid.size() < 4)
        throw std::invalid_argument("scaling_fit: need at least 4 grid points");
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (t_grid[i] < 1 || (i > 0 && t_grid[i] <= t_grid[i - 1]))
            throw std::invalid_argument("scaling_fit: t_grid must be strictly increasing, >= 1");
    }
    ScalingFit out;
    std::vector<double> x_log, x_sqrt;
    x_log.reserve(t_grid.size());
    x_sqrt.reserve(t_grid.size());
    for (std::uint64_t t : t_grid) {
        const RangeSpec range = RangeSpec::decade(t, delta);
        const RangeStats stats = estimate_range_stats(range, cfg, threads);
        out.h_mean.push_back(stats.h_mean);
        out.h_se.push_back(stats.h_se);
        const double lt = std::log(static_cast<double>(t));
        x_log.push_back(lt);
        x_sqrt.push_back(std::sqrt(lt));
    }
    const OlsFit f_log = fit_ols(x_log, out.h_mean);
    const OlsFit f_sqrt = fit_ols(x_sqrt, out.h_mean);
    out.slope_logt = f_log.slope;
    out.r2_logt = f_log.r2;
    out.slope_sqrtlogt = f_sqrt.slope;
    out.r2_sqrtlogt = f_sqrt.r2;
    return out;
}

std::vector<QqPoint> qq_points(std::span<const double> sample, std::size_t n_quantiles) {
    if (n_quantiles < 2)
        throw std::invalid_argument("qq_points: need at least 2 quantiles");
    if (sample.size() < n_quantiles)
        throw std::invalid_argument("qq_points: sample smaller than the quantile count");
    std::vector<double> sorted(sample.begin(), sample.end());
    for (double v : sorted)
        if (std::isnan(v)) throw std::invalid_argument("qq_points: sample contains NaN");
    std::sort(sorted.begin(), sorted.end());

    const double m = static_cast<double>(sorted.size());
    std::vector<QqPoint> points;
    points.reserve(n_quantiles);
    for (std::size_t i = 0; i < n_quantiles; ++i) {
        const double p = (static_cast<double>(i) + 0.5) / static_cast<double>(n_quantiles);
        QqPoint pt;
        pt.theoretical = normal_quantile(p);
        // Hazen plotting positions: order statistic k sits at p = (k - 0.5)/m,
        // so quantiles taken at those positions reproduce the sample exactly.
        const double pos = p * m + 0.5;
        if (pos <= 1.0) {
            pt.empirical = sorted.front();
        } else if (pos >= m) {
            pt.empirical = sorted.back();
        } else {
            const auto k = static_cast<std::size_t>(pos);
            const double frac = pos - static_cast<double>(k);
            pt.empirical = sorted[k - 1] + frac * (sorted[k] - sorted[k - 1]);
        }
        points.push_back(pt);
    }
    return points;
}

}  // namespace siattn
