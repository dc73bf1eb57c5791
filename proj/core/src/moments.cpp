#include "siattn/moments.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace siattn {

double gaussian_exp_moment(const GaussianParams& g, int k, double c) {
    if (!(g.sigma2 >= 0.0))
        throw std::invalid_argument("gaussian_exp_moment: variance must be nonnegative");
    const double base = std::exp(0.5 * c * c * g.sigma2 + c * g.mu);
    const double shifted_mean = g.mu + c * g.sigma2;
    switch (k) {
        case 0:
            return base;
        case 1:
            return shifted_mean * base;
        case 2:
            return (shifted_mean * shifted_mean + g.sigma2) * base;
        default:
            throw std::invalid_argument("gaussian_exp_moment: unsupported moment order k=" +
                                        std::to_string(k));
    }
}

double expected_unnorm_attention(std::uint64_t t, const ScheduleParams& params) {
    validate(params);
    return params.alpha / (static_cast<double>(t) / params.tau + 1.0);
}

double expected_negentropy_term(std::uint64_t t, const ScheduleParams& params) {
    validate(params);
    return params.beta / (static_cast<double>(t) / params.tau + 1.0);
}

HarmonicBounds harmonic_bounds(std::uint64_t a, std::uint64_t b) {
    if (a < 2)
        throw std::invalid_argument("harmonic_bounds: a must be >= 2");
    if (a > b)
        throw std::invalid_argument("harmonic_bounds: need a <= b");
    const double lower = std::log(static_cast<double>(b + 1) / static_cast<double>(a));
    const double upper = std::log(static_cast<double>(b) / static_cast<double>(a - 1));
    return HarmonicBounds{lower, upper};
}

double range_asymptote(std::uint64_t delta, const ScheduleParams& params, RangeMoment which) {
    validate(params);
    if (delta < 2)
        throw std::invalid_argument("range_asymptote: delta must be >= 2");
    const double scale = (which == RangeMoment::kTotal) ? params.alpha : params.beta;
    return scale * params.tau * std::log(static_cast<double>(delta));
}

}  // namespace siattn
