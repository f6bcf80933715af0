#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fsg/kde.hpp"

namespace fsg {

struct NeighborSample {
  uint32_t query;
  uint32_t source;
};

struct CountedNeighborSample {
  uint32_t query;
  uint32_t source;
  uint32_t count;
};

struct SampleDiagnostics {
  std::vector<uint64_t> entries_per_level;
  std::vector<uint64_t> tickets_per_level;
  uint64_t degenerate_draws = 0;  // both child sums at the underflow floor
};

struct SamplerOptions {
  // Ranges at or below this size are summed directly instead of going
  // through the estimator; an exact sum satisfies every (1 +- eps)
  // contract. 0 sends everything through the estimator.
  uint32_t inline_range = 64;
};

// One kernel-weighted random neighbor per query, sampled by recursive
// halving of the source index range driven by KDE queries. Self-selection
// (source == query) is permitted; the caller decides its fate.
// Output is sorted by query index. Same seed, same output.
std::vector<NeighborSample> sample_neighbors(
    std::span<const uint32_t> queries, const KdeEstimator& estimator,
    uint64_t seed, SampleDiagnostics* diagnostics = nullptr,
    const SamplerOptions& options = {});

// Equivalent in distribution to `rounds` independent runs of
// sample_neighbors with per-round streams: each query carries `rounds`
// tickets which split binomially at every node. Returns per-(query, source)
// counts, sorted by (query, source).
std::vector<CountedNeighborSample> sample_neighbors_counted(
    std::span<const uint32_t> queries, const KdeEstimator& estimator,
    uint32_t rounds, uint64_t seed, SampleDiagnostics* diagnostics = nullptr,
    const SamplerOptions& options = {});

}  // namespace fsg
