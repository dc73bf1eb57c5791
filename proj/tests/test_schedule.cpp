#include <doctest.h>

#include <stdexcept>
#include <cmath>
#include <random>

#include "siattn/schedule.hpp"

using namespace siattn;

TEST_CASE("resolve_params pins alpha = beta = e^0.5") {
    const ScheduleParams p = resolve_params(10.0);
    CHECK(p.alpha == std::exp(0.5));
    CHECK(p.beta == std::exp(0.5));
    CHECK(p.tau == 10.0);
    CHECK(p.alpha == doctest::Approx(1.6487212707001282).epsilon(1e-15));
    // validity margin: beta - alpha*ln(alpha) = e^0.5 * (1 - 0.5) > 0
    CHECK(p.beta - p.alpha * std::log(p.alpha) > 0.0);
}

TEST_CASE("resolve_params rejects non-positive tau") {
    CHECK_THROWS_AS(resolve_params(0.0), std::invalid_argument);
    CHECK_THROWS_AS(resolve_params(-3.0), std::invalid_argument);
    CHECK_THROWS_AS(resolve_params(std::nan("")), std::invalid_argument);
}

TEST_CASE("boundary condition: schedule_at(0) is exactly (1, 0)") {
    for (double tau : {1.0, 10.0, 100.0}) {
        const SchedulePoint pt = schedule_at(0, resolve_params(tau));
        CHECK(pt.a == 1.0);
        CHECK(pt.m == 0.0);
    }
}

TEST_CASE("schedule_at matches the closed form with resolved params") {
    const ScheduleParams p = resolve_params(10.0);

    const SchedulePoint p10 = schedule_at(10, p);
    const double a2_10 = 1.0 + 2.0 * std::log(2.0);  // 2.386294...
    CHECK(p10.a * p10.a == doctest::Approx(a2_10).epsilon(1e-14));
    CHECK(p10.m == doctest::Approx(-2.0 * std::log(2.0)).epsilon(1e-14));

    const SchedulePoint p90 = schedule_at(90, p);
    CHECK(p90.a * p90.a == doctest::Approx(1.0 + 2.0 * std::log(10.0)).epsilon(1e-14));
    CHECK(p90.m == doctest::Approx(-2.0 * std::log(10.0)).epsilon(1e-14));
}

TEST_CASE("transform_logit") {
    const ScheduleParams p = resolve_params(10.0);
    SUBCASE("identity at distance zero") {
        CHECK(transform_logit(0.37, 0, p) == 0.37);
        CHECK(transform_logit(-2.5, 0, p) == -2.5);
    }
    SUBCASE("pure shift at score zero") {
        CHECK(transform_logit(0.0, 90, p) ==
              doctest::Approx(-2.0 * std::log(10.0)).epsilon(1e-14));
    }
    SUBCASE("score one at distance ten") {
        const double expected = std::sqrt(1.0 + 2.0 * std::log(2.0)) - 2.0 * std::log(2.0);
        CHECK(transform_logit(1.0, 10, p) == doctest::Approx(expected).epsilon(1e-14));
        CHECK(expected == doctest::Approx(0.158469168).epsilon(1e-8));
    }
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(validate(ScheduleParams{-1.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ScheduleParams{1.0, 0.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(validate(ScheduleParams{1.0, 1.0, -2.0}), std::invalid_argument);
    // beta below alpha*ln(alpha) makes a_t^2 negative at t = 0
    CHECK_THROWS_AS(validate(ScheduleParams{3.0, 3.0 * std::log(3.0) - 0.1, 5.0}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate(ScheduleParams{3.0, 3.0 * std::log(3.0), 5.0}));
}

TEST_CASE("schedule monotonicity and the m + a^2 = beta/alpha identity") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double alpha = u(rng);
        const double beta = alpha * std::log(alpha) + u(rng);  // valid by construction
        const ScheduleParams p{alpha, beta, u(rng) * 25.0};
        double prev_a2 = -1.0, prev_m = 1e300;
        for (std::uint64_t t : {0ull, 1ull, 2ull, 7ull, 63ull, 1024ull, 100000ull}) {
            const SchedulePoint pt = schedule_at(t, p);
            const double a2 = pt.a * pt.a;
            CHECK(a2 >= 0.0);
            CHECK(a2 >= prev_a2);
            CHECK(pt.m <= prev_m);
            CHECK(pt.m + a2 == doctest::Approx(beta / alpha).epsilon(1e-12));
            prev_a2 = a2;
            prev_m = pt.m;
        }
    }
}

TEST_CASE("transform preserves within-distance ordering") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const ScheduleParams p = resolve_params(10.0);
    for (int trial = 0; trial < 200; ++trial) {
        double s1 = u(rng), s2 = u(rng);
        if (s1 == s2) continue;
        if (s1 > s2) std::swap(s1, s2);
        const auto t = static_cast<std::uint64_t>(rng() % 100000);
        CHECK(transform_logit(s1, t, p) < transform_logit(s2, t, p));
    }
}
