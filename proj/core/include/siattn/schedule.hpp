#pragma once

#include <cstdint>

namespace siattn {

// Hyperparameters of the scale-invariant logit transformation: a multiplier
// alpha, the negentropy constant beta, and the lengthscale tau (in tokens).
struct ScheduleParams {
    double alpha = 0.0;
    double beta = 0.0;
    double tau = 0.0;
};

// The per-distance transform L = a * score + m evaluated at token distance t.
struct SchedulePoint {
    std::uint64_t t = 0;
    double a = 1.0;  // standard-deviation multiplier, a_t > 0
    double m = 0.0;  // additive shift
};

// Throws std::invalid_argument unless alpha, beta, tau > 0 and
// beta >= alpha * ln(alpha) (which keeps a_t^2 >= 0 for every t >= 0).
void validate(const ScheduleParams& params);

// Resolves the one-parameter family: alpha = beta = e^0.5, so the transform
// is the identity at distance zero (a_0 = 1, m_0 = 0).
ScheduleParams resolve_params(double tau);

// a_t = sqrt(2 [ln(t/tau + 1) - ln(alpha) + beta/alpha]),  m_t = -a_t^2 + beta/alpha.
SchedulePoint schedule_at(std::uint64_t t, const ScheduleParams& params);

// a_t * score + m_t.
double transform_logit(double score, std::uint64_t t, const ScheduleParams& params);

}  // namespace siattn
