#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fsg/labels.hpp"

namespace fsg {

struct Edge {
  uint32_t u;
  uint32_t v;
  double w;
};

// Undirected, positively weighted, self-loop-free graph. Edges are stored
// once with u < v, sorted; vertex degrees are cached at construction and the
// graph is immutable afterwards.
class WeightedGraph {
public:
  uint32_t num_vertices() const { return n_; }
  size_t num_edges() const { return edges_.size(); }
  const std::vector<Edge>& edges() const { return edges_; }
  const std::vector<double>& degrees() const { return degrees_; }
  double degree(uint32_t v) const { return degrees_[v]; }
  double total_weight() const { return total_weight_; }
  size_t memory_bytes() const;

private:
  friend class GraphBuilder;
  friend WeightedGraph read_edge_list(std::istream&);

  WeightedGraph(uint32_t n, std::vector<Edge> sorted_edges);

  uint32_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> degrees_;
  double total_weight_ = 0.0;
};

// Accumulates edges and produces a WeightedGraph. Duplicate (u, v) pairs
// merge by summing weights unless strict mode is requested, in which case
// they raise InvalidConfig.
class GraphBuilder {
public:
  explicit GraphBuilder(uint32_t n, bool strict = false);

  void reserve(size_t m) { edges_.reserve(m); }
  void add_edge(uint32_t u, uint32_t v, double w);
  // Takes ownership of an already sorted, duplicate-free edge array
  // (validated in one pass) so build() can avoid a copy.
  void adopt_sorted_unique(std::vector<Edge> edges);
  WeightedGraph build();

private:
  uint32_t n_;
  bool strict_;
  std::vector<Edge> edges_;
};

// Membership mask over [0, n).
class VertexSet {
public:
  explicit VertexSet(uint32_t n) : mask_(n, 0) {}
  static VertexSet from_indices(uint32_t n, const std::vector<uint32_t>& idx);
  static VertexSet from_labels(const ClusterLabels& labels, uint32_t which);

  uint32_t n() const { return static_cast<uint32_t>(mask_.size()); }
  bool contains(uint32_t v) const { return mask_[v] != 0; }
  void insert(uint32_t v) {
    count_ += mask_[v] ? 0 : 1;
    mask_[v] = 1;
  }
  uint32_t count() const { return count_; }

private:
  std::vector<uint8_t> mask_;
  uint32_t count_ = 0;
};

double volume(const WeightedGraph& g, const VertexSet& s);
double boundary(const WeightedGraph& g, const VertexSet& s);
// phi(S) = boundary(S) / volume(S); throws EmptyOrIsolated when vol(S) = 0.
double conductance(const WeightedGraph& g, const VertexSet& s);
// max_i phi(A_i) for a given partition (upper bound certificate for rho(k)).
double kway_expansion_of_partition(const WeightedGraph& g,
                                   const std::vector<VertexSet>& parts);

// Matrix-free N = I - D^{-1/2} A D^{-1/2}. Rejects isolated vertices.
class NormalizedLaplacian {
public:
  explicit NormalizedLaplacian(const WeightedGraph& g);

  uint32_t n() const { return g_.num_vertices(); }
  // y = N x. Deterministic for any worker count.
  void apply(const double* x, double* y) const;
  const std::vector<double>& inv_sqrt_degrees() const { return inv_sqrt_deg_; }
  const WeightedGraph& graph() const { return g_; }

private:
  const WeightedGraph& g_;
  std::vector<double> inv_sqrt_deg_;
  mutable std::vector<double> scratch_;
};

uint32_t connected_component_count(const WeightedGraph& g);
std::vector<uint32_t> connected_components(const WeightedGraph& g);

// Text format: header "n m", then one "u v w" line per edge with weights
// printed to 17 significant digits (round-trip exact).
void write_edge_list(std::ostream& out, const WeightedGraph& g);
WeightedGraph read_edge_list(std::istream& in);
void save_edge_list(const std::string& path, const WeightedGraph& g);
WeightedGraph load_edge_list(const std::string& path);

}  // namespace fsg
