#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "siattn/schedule.hpp"
#include "siattn/tensor.hpp"

namespace siattn {

// Positional schemes. Frequencies follow w_k = theta^(-2k/d), k = 0..d/2-1.
struct NoPe {};
struct Rope {
    double theta = 10000.0;
};
// Partial RoPE: frequency pairs slower than 1/effective_base are left unrotated.
struct PRope {
    double theta = 10000.0;
    double effective_base = 1024.0;
};
// NTK-aware base scaling, active only when infer_len exceeds train_len.
struct Ntk {
    double theta = 10000.0;
    std::uint64_t train_len = 1;
    std::uint64_t infer_len = 1;
};
using PosScheme = std::variant<NoPe, Rope, PRope, Ntk>;

// Logit modifiers applied to the score at query-key distance t.
struct Identity {};
struct ScaleInvariant {
    ScheduleParams params;
};
struct LogN {
    double s = 0.4;
    bool per_query = true;  // N = visible keys (i + 1) if set, else sequence length
};
struct Alibi {
    int n_heads = 1;
};
using Modifier = std::variant<Identity, ScaleInvariant, LogN, Alibi>;

struct AttentionConfig {
    PosScheme pos = NoPe{};
    Modifier modifier = Identity{};
    int head_dim = 0;  // must match the Q/K feature dimension; even
    int n_heads = 1;
    bool return_weights = false;
};

// Rotation frequencies for one head; NoPE yields all zeros (identity rotation).
std::vector<double> rope_frequencies(const PosScheme& scheme, int head_dim);

// theta * (infer_len / train_len)^(d / (d - 2)); unchanged when infer <= train.
double ntk_adjusted_theta(double theta, std::uint64_t train_len, std::uint64_t infer_len,
                          int head_dim);

// Rotates each feature pair (x[2k], x[2k+1]) of row i by positions[i] * freqs[k].
Tensor apply_rope(const Tensor& x, std::span<const std::int64_t> positions,
                  std::span<const double> freqs);

// Geometric ALiBi slope convention: 2^(-8 (head_index + 1) / n_heads).
double alibi_slope(int head_index, int n_heads);

struct AttentionResult {
    Tensor output;                   // [n x d_v]
    std::optional<Tensor> weights;   // [n x n], present iff cfg.return_weights
};

// Forward-only dense causal attention for a single head. Scores are
// (1/sqrt(d)) q.k on rotated inputs, the modifier maps scores to logits at
// distance t = i - j, and each row goes through a max-shifted softmax.
AttentionResult causal_attention(const Tensor& q, const Tensor& k, const Tensor& v,
                                 const AttentionConfig& cfg, int head_index);

struct AttentionMetrics {
    double global_entropy = 0.0;
    std::vector<double> range_entropies;  // one per consecutive boundary pair
    double local_mass = 0.0;              // weight on distances 1..local_window
};

// Distribution metrics of one query row of a weights matrix. Boundaries are
// distances; range k covers t in [boundaries[k], boundaries[k+1]).
AttentionMetrics attention_metrics(const Tensor& weights, std::size_t query_index,
                                   std::span<const std::uint64_t> boundaries,
                                   std::uint64_t local_window);

}  // namespace siattn
