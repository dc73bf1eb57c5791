#include "siattn/attention.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace siattn {

namespace {

void require_matrix(const Tensor& t, const char* name) {
    validate(t);
    if (t.ndim() != 2)
        throw std::invalid_argument(std::string(name) + ": expected a 2-D tensor");
}

void require_finite(const Tensor& t, const char* name) {
    for (double v : t.data)
        if (std::isnan(v))
            throw std::invalid_argument(std::string(name) + ": input contains NaN");
}

std::vector<double> base_spectrum(double theta, int head_dim) {
    if (!(theta > 1.0)) throw std::invalid_argument("rope_frequencies: theta must be > 1");
    const int half = head_dim / 2;
    std::vector<double> freqs(half);
    for (int k = 0; k < half; ++k)
        freqs[k] = std::exp(-2.0 * k * std::log(theta) / head_dim);
    return freqs;
}

}  // namespace

std::vector<double> rope_frequencies(const PosScheme& scheme, int head_dim) {
    if (head_dim <= 0 || head_dim % 2 != 0)
        throw std::invalid_argument("rope_frequencies: head_dim must be positive and even");
    return std::visit(
        [head_dim](const auto& s) -> std::vector<double> {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, NoPe>) {
                return std::vector<double>(head_dim / 2, 0.0);
            } else if constexpr (std::is_same_v<T, Rope>) {
                return base_spectrum(s.theta, head_dim);
            } else if constexpr (std::is_same_v<T, PRope>) {
                if (!(s.effective_base > 1.0))
                    throw std::invalid_argument("rope_frequencies: effective_base must be > 1");
                auto freqs = base_spectrum(s.theta, head_dim);
                const double cutoff = 1.0 / s.effective_base;
                for (double& w : freqs)
                    if (w < cutoff) w = 0.0;
                return freqs;
            } else {
                static_assert(std::is_same_v<T, Ntk>);
                const double theta =
                    ntk_adjusted_theta(s.theta, s.train_len, s.infer_len, head_dim);
                return base_spectrum(theta, head_dim);
            }
        },
        scheme);
}

double ntk_adjusted_theta(double theta, std::uint64_t train_len, std::uint64_t infer_len,
                          int head_dim) {
    if (head_dim < 4)
        throw std::invalid_argument("ntk_adjusted_theta: head_dim must be >= 4");
    if (!(theta > 1.0)) throw std::invalid_argument("ntk_adjusted_theta: theta must be > 1");
    if (train_len == 0) throw std::invalid_argument("ntk_adjusted_theta: train_len must be > 0");
    if (infer_len <= train_len) return theta;
    const double ratio = static_cast<double>(infer_len) / static_cast<double>(train_len);
    const double exponent = static_cast<double>(head_dim) / (head_dim - 2.0);
    return theta * std::pow(ratio, exponent);
}

Tensor apply_rope(const Tensor& x, std::span<const std::int64_t> positions,
                  std::span<const double> freqs) {
    require_matrix(x, "apply_rope");
    const std::size_t seq = x.rows();
    const std::size_t dim = x.cols();
    if (dim % 2 != 0) throw std::invalid_argument("apply_rope: head_dim must be even");
    if (positions.size() != seq)
        throw std::invalid_argument("apply_rope: positions length must equal the row count");
    if (freqs.size() != dim / 2)
        throw std::invalid_argument("apply_rope: need head_dim/2 frequencies");

    Tensor out = x;
    for (std::size_t i = 0; i < seq; ++i) {
        const double pos = static_cast<double>(positions[i]);
        for (std::size_t k = 0; k < dim / 2; ++k) {
            if (freqs[k] == 0.0) continue;  // unrotated pair
            const double angle = pos * freqs[k];
            const double c = std::cos(angle);
            const double s = std::sin(angle);
            const double v0 = out.at(i, 2 * k);
            const double v1 = out.at(i, 2 * k + 1);
            out.at(i, 2 * k) = v0 * c - v1 * s;
            out.at(i, 2 * k + 1) = v0 * s + v1 * c;
        }
    }
    return out;
}

double alibi_slope(int head_index, int n_heads) {
    if (n_heads <= 0) throw std::invalid_argument("alibi_slope: n_heads must be positive");
    if (head_index < 0 || head_index >= n_heads)
        throw std::invalid_argument("alibi_slope: head_index out of range");
    return std::exp2(-8.0 * (head_index + 1) / n_heads);
}

AttentionResult causal_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                 const AttentionConfig& cfg, int head_index) {
    require_matrix(q, "causal_attention: Q");
    require_matrix(k, "causal_attention: K");
    require_matrix(v, "causal_attention: V");
    const std::size_t n = q.rows();
    const std::size_t d = q.cols();
    if (k.rows() != n || k.cols() != d)
        throw std::invalid_argument("causal_attention: K shape must match Q");
    if (v.rows() != n)
        throw std::invalid_argument("causal_attention: V row count must match Q");
    if (cfg.head_dim != static_cast<int>(d))
        throw std::invalid_argument("causal_attention: cfg.head_dim does not match Q/K");
    if (d % 2 != 0) throw std::invalid_argument("causal_attention: head_dim must be even");
    if (cfg.n_heads <= 0 || head_index < 0 || head_index >= cfg.n_heads)
        throw std::invalid_argument("causal_attention: head_index out of range");
    require_finite(q, "causal_attention: Q");
    require_finite(k, "causal_attention: K");
    require_finite(v, "causal_attention: V");

    const std::vector<double> freqs = rope_frequencies(cfg.pos, cfg.head_dim);
    bool rotate = false;
    for (double w : freqs) rotate |= (w != 0.0);

    std::vector<std::int64_t> positions(n);
    for (std::size_t i = 0; i < n; ++i) positions[i] = static_cast<std::int64_t>(i);
    const Tensor qr = rotate ? apply_rope(q, positions, freqs) : q;
    const Tensor kr = rotate ? apply_rope(k, positions, freqs) : k;

    // Per-distance logit map, resolved once outside the row loops.
    std::vector<double> si_mul, si_shift;
    double alibi = 0.0, logn_s = 0.0;
    bool logn_per_query = true;
    enum class Kind { kIdentity, kScaleInvariant, kLogN, kAlibi } kind = Kind::kIdentity;
    if (const auto* si = std::get_if<ScaleInvariant>(&cfg.modifier)) {
        kind = Kind::kScaleInvariant;
        si_mul.resize(n);
        si_shift.resize(n);
        for (std::size_t t = 0; t < n; ++t) {
            const SchedulePoint pt = schedule_at(t, si->params);
            si_mul[t] = pt.a;
            si_shift[t] = pt.m;
        }
    } else if (const auto* ln = std::get_if<LogN>(&cfg.modifier)) {
        kind = Kind::kLogN;
        logn_s = ln->s;
        logn_per_query = ln->per_query;
    } else if (const auto* al = std::get_if<Alibi>(&cfg.modifier)) {
        kind = Kind::kAlibi;
        if (head_index >= al->n_heads)
            throw std::invalid_argument("causal_attention: head_index out of ALiBi range");
        alibi = alibi_slope(head_index, al->n_heads);
    }

    const std::size_t d_v = v.cols();
    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));

    AttentionResult result;
    result.output = Tensor::zeros({n, d_v});
    if (cfg.return_weights) result.weights = Tensor::zeros({n, n});

    std::vector<double> logits(n);
    std::vector<double> probs(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double logn_factor =
            logn_s * std::log(static_cast<double>(logn_per_query ? i + 1 : n));
        double row_max = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j <= i; ++j) {
            double s = 0.0;
            const double* qi = qr.data.data() + i * d;
            const double* kj = kr.data.data() + j * d;
            for (std::size_t f = 0; f < d; ++f) s += qi[f] * kj[f];
            s *= inv_sqrt_d;
            const std::size_t t = i - j;
            double l = s;
            switch (kind) {
                case Kind::kIdentity: break;
                case Kind::kScaleInvariant: l = si_mul[t] * s + si_shift[t]; break;
                case Kind::kLogN: l = logn_factor * s; break;
                case Kind::kAlibi: l = s - alibi * static_cast<double>(t); break;
            }
            logits[j] = l;
            row_max = std::max(row_max, l);
        }
        double z = 0.0;
        for (std::size_t j = 0; j <= i; ++j) {
            probs[j] = std::exp(logits[j] - row_max);
            z += probs[j];
        }
        const double inv_z = 1.0 / z;
        for (std::size_t j = 0; j <= i; ++j) probs[j] *= inv_z;

        double* out_row = result.output.data.data() + i * d_v;
        for (std::size_t j = 0; j <= i; ++j) {
            const double p = probs[j];
            const double* vj = v.data.data() + j * d_v;
            for (std::size_t f = 0; f < d_v; ++f) out_row[f] += p * vj[f];
        }
        if (result.weights) {
            double* w_row = result.weights->data.data() + i * n;
            for (std::size_t j = 0; j <= i; ++j) w_row[j] = probs[j];
        }
    }
    return result;
}

AttentionMetrics attention_metrics(const Tensor& weights, std::size_t query_index,
                                   std::span<const std::uint64_t> boundaries,
                                   std::uint64_t local_window) {
    require_matrix(weights, "attention_metrics");
    const std::size_t n = weights.cols();
    if (query_index >= weights.rows())
        throw std::invalid_argument("attention_metrics: query_index out of range");
    if (local_window == 0)
        throw std::invalid_argument("attention_metrics: local_window must be positive");
    if (!boundaries.empty() && boundaries[0] == 0)
        throw std::invalid_argument("attention_metrics: boundaries must be >= 1");
    for (std::size_t b = 1; b < boundaries.size(); ++b)
        if (boundaries[b] <= boundaries[b - 1])
            throw std::invalid_argument("attention_metrics: boundaries must be increasing");

    const double* row = weights.data.data() + query_index * n;
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (row[j] < 0.0 || std::isnan(row[j]))
            throw std::invalid_argument("attention_metrics: row is not a probability vector");
        total += row[j];
    }
    if (std::fabs(total - 1.0) > 1e-8)
        throw std::invalid_argument("attention_metrics: row is not normalised");

    AttentionMetrics out;
    for (std::size_t j = 0; j <= query_index && j < n; ++j) {
        const double p = row[j];
        if (p > 0.0) out.global_entropy -= p * std::log(p);
    }

    // Entropy of the row renormalised over distances [b_k, b_{k+1}).
    for (std::size_t b = 0; b + 1 < boundaries.size(); ++b) {
        double z = 0.0, neg = 0.0;
        for (std::uint64_t t = boundaries[b]; t < boundaries[b + 1]; ++t) {
            if (t > query_index) break;
            const double p = row[query_index - t];
            if (p > 0.0) {
                z += p;
                neg += p * std::log(p);
            }
        }
        out.range_entropies.push_back(z > 0.0 ? std::log(z) - neg / z : 0.0);
    }

    for (std::uint64_t t = 1; t <= local_window && t <= query_index; ++t)
        out.local_mass += row[query_index - t];
    return out;
}

}  // namespace siattn
