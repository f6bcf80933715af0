#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fsg/graph.hpp"
#include "fsg/kde.hpp"
#include "fsg/labels.hpp"

namespace fsg {

struct SparsifierConfig {
  double C = 1.0;
  double lambda_k1_estimate = 1.0;  // lambda_{k+1}(N_K) is Omega(1) for
                                    // well-clustered data
  uint32_t rounds = 0;              // 0 = ceil(6 C log(n) / lambda estimate)
  double epsilon = 0.0;             // 0 = 1 / (6 log(n))
  LogBase log_base = LogBase::two;
  uint64_t seed = 1;
  KdeConfig kde;

  uint32_t rounds_for(uint32_t n) const;
  double epsilon_for(uint32_t n) const;
};

// Per-edge quantities of the weighting step, exposed for verification.
struct EdgeEstimate {
  uint32_t i;
  uint32_t j;
  double k_ij;
  double g_i;
  double g_j;
  double p_hat_i_j;
  double p_hat_j_i;
  double p_hat;
};

struct BuildReport {
  uint32_t n = 0;
  uint32_t rounds = 0;
  double epsilon = 0.0;
  std::string backend;
  size_t sampled_pairs = 0;
  size_t self_pairs_discarded = 0;
  size_t underflow_edges_discarded = 0;
  size_t edge_count = 0;
  uint64_t degenerate_draws = 0;
  double estimator_build_seconds = 0.0;
  double sampling_seconds = 0.0;
  double degree_kde_seconds = 0.0;
  double weighting_seconds = 0.0;
  double total_seconds = 0.0;
  size_t estimator_bytes = 0;
  size_t graph_bytes = 0;
  std::string to_json() const;
};

// FastSimilarityGraph: L sampling rounds over all points, duplicate pairs
// and self-samples collapsed, edge (i, j) weighted k(x_i, x_j) / p_hat(i, j)
// where p_hat_i(j) = min{L k(x_i, x_j) / g_[1,n](x_i), 1}. The returned
// graph has at most n * L edges.
WeightedGraph build_similarity_graph(
    const Dataset& ds, const Kernel& kernel, const SparsifierConfig& config,
    BuildReport* report = nullptr,
    std::vector<EdgeEstimate>* estimates = nullptr);

// The explicit fully connected similarity graph; quadratic, capped.
// Pairs whose kernel value underflows to zero are omitted (weights must be
// positive).
WeightedGraph build_full_graph(const Dataset& ds, const Kernel& kernel,
                               size_t oracle_cap = 20000);

// Reference sparsifier over an explicit graph: every edge kept independently
// with probability p_e = p_u(v) + p_v(u) - p_u(v) p_v(u), where
// p_u(v) = min{C (log n / lambda_k1) w(u,v) / deg(u), 1}; kept edges are
// reweighted w / p_e.
WeightedGraph sz_sparsify(const WeightedGraph& g, uint32_t k, double lambda_k1,
                          double C, uint64_t seed,
                          LogBase log_base = LogBase::two);

struct GraphSummary {
  std::string name;
  size_t edge_count = 0;
  std::vector<double> eigenvalues;            // lambda_1 .. lambda_{k+2}
  std::vector<double> cluster_conductances;   // of this graph's own partition
  double max_conductance = 0.0;
  double ari_vs_reference = -2.0;             // -2 when no reference labels
  double min_degree_ratio_vs_full = 0.0;
  double median_degree_ratio_vs_full = 0.0;
  double max_degree_ratio_vs_full = 0.0;
};

struct CompareReport {
  uint32_t n = 0;
  uint32_t k = 0;
  GraphSummary full;
  GraphSummary fast;
  GraphSummary sz;
  std::string to_json() const;
};

// Pairs the sampled graph against SZ-on-explicit-K and explicit K itself:
// per-vertex degree ratios, edge counts, bottom eigenvalues, and the
// conductance of each graph's own spectral k-partition.
CompareReport compare_sparsifiers(const Dataset& ds, const Kernel& kernel,
                                  const SparsifierConfig& config, uint32_t k,
                                  const ClusterLabels* reference = nullptr,
                                  size_t oracle_cap = 20000);

}  // namespace fsg
