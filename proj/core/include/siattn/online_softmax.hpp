#pragma once

#include <cmath>
#include <limits>

namespace siattn {

// Streaming max-shifted softmax accumulator. Tracks z = sum exp(l - max) and
// n = sum (l - max) exp(l - max) over logits seen so far, rescaling both when
// a new maximum arrives. In the final state z >= 1 and n <= 0, so the entropy
// ln(z) - n/z is nonnegative even in floating point, and a single logit gives
// exactly zero.
struct OnlineSoftmax {
    double max = -std::numeric_limits<double>::infinity();
    double z = 0.0;
    double n = 0.0;

    void add(double logit) noexcept {
        if (logit > max) {
            if (z > 0.0) {
                const double shift = max - logit;
                const double scale = std::exp(shift);
                n = scale * (n + shift * z);
                z *= scale;
            }
            max = logit;
            z += 1.0;  // the new maximum contributes exp(0) = 1 and 0 * 1 = 0
        } else {
            const double d = logit - max;
            const double e = std::exp(d);
            z += e;
            n += d * e;
        }
    }

    double entropy() const noexcept { return z > 0.0 ? std::log(z) - n / z : 0.0; }
};

}  // namespace siattn
