#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fsg {

// Per-point cluster assignment, labels in [0, k).
struct ClusterLabels {
  std::vector<uint32_t> labels;
  uint32_t k = 0;

  uint32_t size() const { return static_cast<uint32_t>(labels.size()); }
};

// Remaps arbitrary label values to a compact [0, k) range.
ClusterLabels compact_labels(const std::vector<uint32_t>& raw);

void save_labels_csv(const std::string& path, const ClusterLabels& labels);
ClusterLabels load_labels_csv(const std::string& path);

}  // namespace fsg
