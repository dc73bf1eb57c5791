#include "siattn/schedule.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace siattn {

void validate(const ScheduleParams& params) {
    if (!(params.alpha > 0.0) || !std::isfinite(params.alpha))
        throw std::invalid_argument("ScheduleParams: alpha must be positive");
    if (!(params.beta > 0.0) || !std::isfinite(params.beta))
        throw std::invalid_argument("ScheduleParams: beta must be positive");
    if (!(params.tau > 0.0) || !std::isfinite(params.tau))
        throw std::invalid_argument("ScheduleParams: tau must be positive");
    if (params.beta < params.alpha * std::log(params.alpha))
        throw std::invalid_argument(
            "ScheduleParams: beta >= alpha*ln(alpha) required (a_t^2 would go negative)");
}

ScheduleParams resolve_params(double tau) {
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::invalid_argument("resolve_params: tau must be positive, got " +
                                    std::to_string(tau));
    const double e_half = std::exp(0.5);
    return ScheduleParams{e_half, e_half, tau};
}

SchedulePoint schedule_at(std::uint64_t t, const ScheduleParams& params) {
    validate(params);
    const double ratio = params.beta / params.alpha;
    const double a2 =
        2.0 * (std::log1p(static_cast<double>(t) / params.tau) - std::log(params.alpha) + ratio);
    return SchedulePoint{t, std::sqrt(a2), ratio - a2};
}

double transform_logit(double score, std::uint64_t t, const ScheduleParams& params) {
    const SchedulePoint pt = schedule_at(t, params);
    return pt.a * score + pt.m;
}

}  // namespace siattn
