#pragma once

#include <cstdint>
#include <span>

#include "siattn/mclab.hpp"
#include "siattn/report.hpp"
#include "siattn/schedule.hpp"

namespace siattn {

// Monte Carlo verification of the Lemma 1/2 expectations over [t, t*delta):
// per (t, delta) cell the report carries the MC estimates, the exact
// closed-form sums, the asymptote alpha*tau*ln(delta) (beta*tau*ln(delta)),
// and a pass flag marking |MC - exact| <= 3 SE for both Z and N~.
ExperimentReport run_theorem1(const ScheduleParams& params,
                              std::span<const std::uint64_t> deltas,
                              std::span<const std::uint64_t> t_grid, const McConfig& mc,
                              unsigned threads = 0);

// Synthetic logit-level comparison of modifier schemes across context lengths:
// mean global entropy, mean entropy per boundary range, and mean attention
// mass on the most recent local_window tokens, for the final query position.
// LogN schemes use n = context length of the cell.
ExperimentReport run_fig1(std::span<const std::uint64_t> context_lengths,
                          std::span<const LogitModel> schemes, const McConfig& mc,
                          std::span<const std::uint64_t> boundaries,
                          std::uint64_t local_window, unsigned threads = 0);

// Entropy-scaling study: mean range entropy over a t grid per delta, with
// least-squares fits against ln(t) and sqrt(ln(t)) recorded in the metadata.
// If mc.modifier holds schedule parameters they are replaced by `params`;
// a non-schedule modifier (the logarithmic-entropy control) is kept as-is.
ExperimentReport run_fig2(const ScheduleParams& params,
                          std::span<const std::uint64_t> deltas,
                          std::span<const std::uint64_t> t_grid, const McConfig& mc,
                          unsigned threads = 0);

}  // namespace siattn
