#pragma once

#include <array>
#include <cstdint>

namespace siattn {

// Philox4x32-10 counter-based block cipher. Stateless: every output block is a
// pure function of (key, counter), so draws can be evaluated in any order and
// on any number of threads without changing a single bit of the stream.
struct Philox4x32 {
    static constexpr std::uint32_t kMulA = 0xD2511F53u;
    static constexpr std::uint32_t kMulB = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeylA = 0x9E3779B9u;
    static constexpr std::uint32_t kWeylB = 0xBB67AE85u;

    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) noexcept {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t pa = static_cast<std::uint64_t>(kMulA) * ctr[0];
            const std::uint64_t pb = static_cast<std::uint64_t>(kMulB) * ctr[2];
            const auto lo_a = static_cast<std::uint32_t>(pa);
            const auto hi_a = static_cast<std::uint32_t>(pa >> 32);
            const auto lo_b = static_cast<std::uint32_t>(pb);
            const auto hi_b = static_cast<std::uint32_t>(pb >> 32);
            ctr = {hi_b ^ ctr[1] ^ key[0], lo_b, hi_a ^ ctr[3] ^ key[1], lo_a};
            key[0] += kWeylA;
            key[1] += kWeylB;
        }
        return ctr;
    }
};

// 64-bit finalizer (splitmix64); used to derive stream ids from range bounds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Inverse standard-normal CDF (Wichura's PPND16 / AS 241). Relative error is
// below 1e-15 across (0, 1), far inside the 1e-9 the QQ machinery needs.
double normal_quantile(double p);

// Maps 64 random bits to a uniform on the open interval (0, 1). 52-bit
// resolution: (k + 0.5) * 2^-52 is exact for every k, so the endpoints are
// unreachable and normal_quantile stays finite.
inline double uniform_open01(std::uint64_t bits) noexcept {
    return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Deterministic standard-normal field indexed by (sample, t). Keyed by a
// 64-bit seed plus a 32-bit stream id so distinct ranges draw distinct,
// effectively independent streams even where their t intervals overlap.
class GaussianField {
public:
    GaussianField(std::uint64_t seed, std::uint32_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    double operator()(std::uint64_t sample, std::uint64_t t) const noexcept {
        const std::array<std::uint32_t, 4> ctr = {
            static_cast<std::uint32_t>(t),
            static_cast<std::uint32_t>(t >> 32),
            static_cast<std::uint32_t>(sample),
            stream_ ^ static_cast<std::uint32_t>(sample >> 32),
        };
        const auto out = Philox4x32::block(ctr, key_);
        const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
        return normal_quantile(uniform_open01(bits));
    }

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_;
};

}  // namespace siattn
