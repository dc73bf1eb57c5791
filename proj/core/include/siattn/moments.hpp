#pragma once

#include <cstdint>

#include "siattn/schedule.hpp"

namespace siattn {

struct GaussianParams {
    double mu = 0.0;
    double sigma2 = 0.0;  // variance, >= 0
};

// E[X^k exp(c X)] for X ~ N(mu, sigma2), via the tilted-Gaussian identity
// E[X^k e^{cX}] = e^{c^2 sigma2 / 2 + c mu} E[Xt^k] with Xt ~ N(mu + c sigma2, sigma2).
// Only k in {0, 1, 2} is supported; other orders throw.
double gaussian_exp_moment(const GaussianParams& g, int k, double c);

// E[exp(L_t)] under the schedule: alpha / (t/tau + 1).
double expected_unnorm_attention(std::uint64_t t, const ScheduleParams& params);

// E[exp(L_t) * L_t] under the schedule: beta / (t/tau + 1).
double expected_negentropy_term(std::uint64_t t, const ScheduleParams& params);

// Integral bounds bracketing sum_{k=a}^{b} 1/k:
//   ln((b+1)/a) <= sum <= ln(b/(a-1)).   Requires 2 <= a <= b.
struct HarmonicBounds {
    double lower = 0.0;
    double upper = 0.0;
};
HarmonicBounds harmonic_bounds(std::uint64_t a, std::uint64_t b);

// Limits of the expected range statistics over [t, t*delta) as t -> infinity.
enum class RangeMoment { kTotal, kNegentropy };
double range_asymptote(std::uint64_t delta, const ScheduleParams& params, RangeMoment which);

}  // namespace siattn
