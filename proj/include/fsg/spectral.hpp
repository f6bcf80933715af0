#pragma once

#include <cstdint>
#include <vector>

#include "fsg/graph.hpp"
#include "fsg/labels.hpp"

namespace fsg {

struct EigenOptions {
  double tol = 1e-6;
  uint64_t max_matvecs = 0;  // 0 = 50 * n
  uint32_t max_basis = 0;    // 0 = auto
  uint64_t seed = 7;
};

// Smallest eigenpairs of the normalized Laplacian, eigenvalues ascending.
// Eigenvectors are stored column-major (n * q values).
struct EigenResult {
  uint32_t n = 0;
  uint32_t q = 0;
  std::vector<double> eigenvalues;
  std::vector<double> eigenvectors;
  std::vector<double> residuals;  // ||N v - lambda v||_2 per pair
  uint64_t matvecs = 0;

  const double* vector(uint32_t i) const {
    return eigenvectors.data() + size_t(i) * n;
  }
};

// Deflated thick-restart Lanczos on the matrix-free operator. The zero
// eigenspace (one D^{1/2} indicator per connected component) is constructed
// exactly first; the remaining pairs come from the iteration. Throws
// NoConvergence with diagnostics once the matvec budget is exhausted.
EigenResult smallest_eigenpairs(const WeightedGraph& g, uint32_t q,
                                const EigenOptions& opts = {});

// Bottom-k eigenvector matrix with rows normalized to unit length
// (all-zero rows stay zero). Row-major n x k.
std::vector<double> spectral_embed(const EigenResult& eigen, uint32_t k);

struct KMeansOptions {
  uint32_t restarts = 10;
  uint32_t max_iters = 300;
  double rel_tol = 1e-8;
  uint64_t seed = 7;
};

struct KMeansResult {
  ClusterLabels labels;
  double cost = 0.0;
  uint32_t iterations = 0;
};

// k-means++ seeding plus Lloyd iterations, best of `restarts` runs.
// Deterministic given the seed. Throws DegenerateInput when there are fewer
// than k distinct rows. cost_trace, when given, records the cost after every
// Lloyd iteration of the winning restart.
KMeansResult kmeans(const std::vector<double>& points, uint32_t n,
                    uint32_t dim, uint32_t k, const KMeansOptions& opts = {},
                    std::vector<double>* cost_trace = nullptr);

struct SpectralOptions {
  EigenOptions eigen;
  KMeansOptions kmeans;
};

// smallest_eigenpairs -> spectral_embed -> kmeans.
ClusterLabels spectral_cluster(const WeightedGraph& g, uint32_t k,
                               uint64_t seed, const SpectralOptions& opts = {});

struct EigenGapScan {
  std::vector<double> eigenvalues;  // lambda_1 .. lambda_{q_max}
  std::vector<double> ratios;       // lambda_{i+1} / lambda_i
};

EigenGapScan eigen_gap_scan(const WeightedGraph& g, uint32_t q_max,
                            const EigenOptions& opts = {});

}  // namespace fsg
