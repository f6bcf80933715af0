#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fsg/graph.hpp"
#include "fsg/labels.hpp"

namespace fsg {

// Fraction of point pairs on which two labelings agree, computed from the
// contingency table in O(n + #cells).
double rand_index(const ClusterLabels& a, const ClusterLabels& b);
double rand_index(std::span<const uint32_t> a, std::span<const uint32_t> b);

// Chance-corrected variant; 1 iff the partitions are identical.
double adjusted_rand_index(const ClusterLabels& a, const ClusterLabels& b);
double adjusted_rand_index(std::span<const uint32_t> a,
                           std::span<const uint32_t> b);

struct MetricReport {
  double rand_index = -1.0;           // -1 when no reference labels
  double adjusted_rand_index = -2.0;  // -2 when no reference labels
  std::vector<double> per_cluster_conductance;
  double max_conductance = 0.0;
  std::string to_json() const;
};

// Conductance of every cluster and the max (the k-way expansion certificate
// of the given partition).
MetricReport conductance_report(const WeightedGraph& g,
                                const ClusterLabels& labels);

}  // namespace fsg
