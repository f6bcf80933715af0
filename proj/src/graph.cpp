#include "fsg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "fsg/common.hpp"

namespace fsg {

WeightedGraph::WeightedGraph(uint32_t n, std::vector<Edge> sorted_edges)
    : n_(n), edges_(std::move(sorted_edges)), degrees_(n, 0.0) {
  for (const Edge& e : edges_) {
    degrees_[e.u] += e.w;
    degrees_[e.v] += e.w;
    total_weight_ += e.w;
  }
}

size_t WeightedGraph::memory_bytes() const {
  return edges_.capacity() * sizeof(Edge) + degrees_.capacity() * sizeof(double);
}

GraphBuilder::GraphBuilder(uint32_t n, bool strict) : n_(n), strict_(strict) {
  if (n == 0) throw InvalidConfig("graph needs at least one vertex");
}

void GraphBuilder::add_edge(uint32_t u, uint32_t v, double w) {
  if (u == v) throw InvalidConfig("self-loops are not allowed");
  if (u >= n_ || v >= n_) throw InvalidConfig("vertex index out of range");
  if (!(w > 0.0) || !std::isfinite(w))
    throw InvalidConfig("edge weights must be positive and finite");
  if (u > v) std::swap(u, v);
  edges_.push_back({u, v, w});
}

void GraphBuilder::adopt_sorted_unique(std::vector<Edge> edges) {
  for (size_t i = 0; i < edges.size(); ++i) {
    const Edge& e = edges[i];
    if (e.u >= e.v || e.v >= n_)
      throw InvalidConfig("adopted edges must have u < v < n");
    if (!(e.w > 0.0) || !std::isfinite(e.w))
      throw InvalidConfig("edge weights must be positive and finite");
    if (i > 0) {
      const Edge& p = edges[i - 1];
      if (p.u > e.u || (p.u == e.u && p.v >= e.v))
        throw InvalidConfig("adopted edges must be sorted and unique");
    }
  }
  edges_ = std::move(edges);
}

WeightedGraph GraphBuilder::build() {
  auto less = [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  };
  if (!std::is_sorted(edges_.begin(), edges_.end(), less))
    std::sort(edges_.begin(), edges_.end(), less);

  bool has_duplicates = false;
  for (size_t i = 1; i < edges_.size(); ++i) {
    if (edges_[i - 1].u == edges_[i].u && edges_[i - 1].v == edges_[i].v) {
      if (strict_)
        throw InvalidConfig("duplicate edge (" + std::to_string(edges_[i].u) +
                            ", " + std::to_string(edges_[i].v) +
                            ") in strict mode");
      has_duplicates = true;
      break;
    }
  }
  if (!has_duplicates) return WeightedGraph(n_, std::move(edges_));

  std::vector<Edge> merged;
  merged.reserve(edges_.size());
  for (const Edge& e : edges_) {
    if (!merged.empty() && merged.back().u == e.u && merged.back().v == e.v)
      merged.back().w += e.w;
    else
      merged.push_back(e);
  }
  edges_.clear();
  edges_.shrink_to_fit();
  return WeightedGraph(n_, std::move(merged));
}

VertexSet VertexSet::from_indices(uint32_t n, const std::vector<uint32_t>& idx) {
  VertexSet s(n);
  for (uint32_t v : idx) {
    if (v >= n) throw InvalidConfig("vertex index out of range");
    s.insert(v);
  }
  return s;
}

VertexSet VertexSet::from_labels(const ClusterLabels& labels, uint32_t which) {
  VertexSet s(labels.size());
  for (uint32_t i = 0; i < labels.size(); ++i)
    if (labels.labels[i] == which) s.insert(i);
  return s;
}

double volume(const WeightedGraph& g, const VertexSet& s) {
  if (s.n() != g.num_vertices()) throw LengthMismatch("vertex set size mismatch");
  double vol = 0.0;
  for (uint32_t v = 0; v < g.num_vertices(); ++v)
    if (s.contains(v)) vol += g.degree(v);
  return vol;
}

double boundary(const WeightedGraph& g, const VertexSet& s) {
  if (s.n() != g.num_vertices()) throw LengthMismatch("vertex set size mismatch");
  double b = 0.0;
  for (const Edge& e : g.edges())
    if (s.contains(e.u) != s.contains(e.v)) b += e.w;
  return b;
}

double conductance(const WeightedGraph& g, const VertexSet& s) {
  double vol = volume(g, s);
  if (!(vol > 0.0))
    throw EmptyOrIsolated("conductance undefined: vol(S) = 0");
  return boundary(g, s) / vol;
}

double kway_expansion_of_partition(const WeightedGraph& g,
                                   const std::vector<VertexSet>& parts) {
  if (parts.empty()) throw InvalidPartition("partition has no parts");
  std::vector<uint8_t> covered(g.num_vertices(), 0);
  for (const VertexSet& p : parts) {
    if (p.n() != g.num_vertices())
      throw InvalidPartition("part over wrong vertex count");
    if (p.count() == 0) throw InvalidPartition("empty part");
    for (uint32_t v = 0; v < g.num_vertices(); ++v) {
      if (!p.contains(v)) continue;
      if (covered[v]) throw InvalidPartition("parts are not disjoint");
      covered[v] = 1;
    }
  }
  for (uint32_t v = 0; v < g.num_vertices(); ++v)
    if (!covered[v]) throw InvalidPartition("parts do not cover all vertices");

  double worst = 0.0;
  for (const VertexSet& p : parts) worst = std::max(worst, conductance(g, p));
  return worst;
}

NormalizedLaplacian::NormalizedLaplacian(const WeightedGraph& g) : g_(g) {
  inv_sqrt_deg_.resize(g.num_vertices());
  for (uint32_t v = 0; v < g.num_vertices(); ++v) {
    double d = g.degree(v);
    if (!(d > 0.0))
      throw IsolatedVertex("vertex " + std::to_string(v) + " has degree 0");
    inv_sqrt_deg_[v] = 1.0 / std::sqrt(d);
  }
}

void NormalizedLaplacian::apply(const double* x, double* y) const {
  const uint32_t n = g_.num_vertices();
  const auto& edges = g_.edges();
  const double* inv = inv_sqrt_deg_.data();

  // Fixed block decomposition keeps the floating-point reduction order
  // independent of the worker count.
  constexpr size_t kBlocks = 32;
  size_t m = edges.size();
  size_t blocks = std::min<size_t>(kBlocks, std::max<size_t>(m, 1));
  scratch_.assign(blocks * size_t(n), 0.0);

  parallel_blocks(m, blocks, [&](size_t b, size_t lo, size_t hi) {
    double* acc = scratch_.data() + b * n;
    for (size_t t = lo; t < hi; ++t) {
      const Edge& e = edges[t];
      double zu = inv[e.u] * x[e.u];
      double zv = inv[e.v] * x[e.v];
      acc[e.u] += e.w * zv;
      acc[e.v] += e.w * zu;
    }
  });

  for (uint32_t v = 0; v < n; ++v) y[v] = x[v];
  for (size_t b = 0; b < blocks; ++b) {
    const double* acc = scratch_.data() + b * n;
    for (uint32_t v = 0; v < n; ++v) y[v] -= inv[v] * acc[v];
  }
}

namespace {

struct UnionFind {
  std::vector<uint32_t> parent;
  explicit UnionFind(uint32_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0u);
  }
  uint32_t find(uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(uint32_t a, uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::vector<uint32_t> connected_components(const WeightedGraph& g) {
  UnionFind uf(g.num_vertices());
  for (const Edge& e : g.edges()) uf.unite(e.u, e.v);
  std::vector<uint32_t> comp(g.num_vertices());
  std::vector<uint32_t> remap(g.num_vertices(), UINT32_MAX);
  uint32_t next = 0;
  for (uint32_t v = 0; v < g.num_vertices(); ++v) {
    uint32_t r = uf.find(v);
    if (remap[r] == UINT32_MAX) remap[r] = next++;
    comp[v] = remap[r];
  }
  return comp;
}

uint32_t connected_component_count(const WeightedGraph& g) {
  auto comp = connected_components(g);
  uint32_t c = 0;
  for (uint32_t v : comp) c = std::max(c, v + 1);
  return c;
}

void write_edge_list(std::ostream& out, const WeightedGraph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  char buf[40];
  for (const Edge& e : g.edges()) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.w);
    out << e.u << ' ' << e.v << ' ' << buf << '\n';
  }
}

WeightedGraph read_edge_list(std::istream& in) {
  uint32_t n = 0;
  size_t m = 0;
  if (!(in >> n >> m)) throw IoError("edge list: malformed header");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (size_t i = 0; i < m; ++i) {
    Edge e;
    if (!(in >> e.u >> e.v >> e.w)) throw IoError("edge list: malformed edge");
    if (e.u > e.v) std::swap(e.u, e.v);
    edges.push_back(e);
  }
  auto less = [](const Edge& a, const Edge& b) {
    return a.u != b.u ? a.u < b.u : a.v < b.v;
  };
  if (!std::is_sorted(edges.begin(), edges.end(), less))
    std::sort(edges.begin(), edges.end(), less);
  return WeightedGraph(n, std::move(edges));
}

void save_edge_list(const std::string& path, const WeightedGraph& g) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_edge_list(out, g);
  if (!out) throw IoError("failed writing " + path);
}

WeightedGraph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_edge_list(in);
}

}  // namespace fsg
