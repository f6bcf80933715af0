#include "fsg/sparsifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <json.hpp>

#include "fsg/common.hpp"
#include "fsg/eval.hpp"
#include "fsg/rng.hpp"
#include "fsg/sampler.hpp"
#include "fsg/spectral.hpp"

namespace fsg {

uint32_t SparsifierConfig::rounds_for(uint32_t n) const {
  if (rounds > 0) return rounds;
  double l = std::max(log_n(std::max<uint32_t>(n, 2), log_base), 1.0);
  double r = std::ceil(6.0 * C * l / lambda_k1_estimate);
  if (!(r >= 1.0) || r > 4e9) throw InvalidConfig("invalid round count");
  return static_cast<uint32_t>(r);
}

double SparsifierConfig::epsilon_for(uint32_t n) const {
  if (epsilon > 0.0) return epsilon;
  return default_epsilon(n, log_base);
}

std::string BuildReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["rounds"] = rounds;
  j["epsilon"] = epsilon;
  j["backend"] = backend;
  j["sampled_pairs"] = sampled_pairs;
  j["self_pairs_discarded"] = self_pairs_discarded;
  j["underflow_edges_discarded"] = underflow_edges_discarded;
  j["edge_count"] = edge_count;
  j["degenerate_draws"] = degenerate_draws;
  j["estimator_build_seconds"] = estimator_build_seconds;
  j["sampling_seconds"] = sampling_seconds;
  j["degree_kde_seconds"] = degree_kde_seconds;
  j["weighting_seconds"] = weighting_seconds;
  j["total_seconds"] = total_seconds;
  j["estimator_bytes"] = estimator_bytes;
  j["graph_bytes"] = graph_bytes;
  return j.dump(2);
}

WeightedGraph build_similarity_graph(const Dataset& ds, const Kernel& kernel,
                                     const SparsifierConfig& config,
                                     BuildReport* report,
                                     std::vector<EdgeEstimate>* estimates) {
  const uint32_t n = ds.size();
  if (n < 2) throw TooFewPoints("similarity graph needs n >= 2");
  const uint32_t L = config.rounds_for(n);
  const double eps = config.epsilon_for(n);

  double t0 = now_seconds();
  KdeConfig kc = config.kde;
  kc.epsilon = eps;
  kc.log_base = config.log_base;
  auto estimator = make_estimator(ds, kernel, kc);
  double t1 = now_seconds();

  std::vector<uint32_t> all(n);
  std::iota(all.begin(), all.end(), 0u);
  SampleDiagnostics diag;
  auto counted = sample_neighbors_counted(all, *estimator, L, config.seed,
                                          &diag);
  double t2 = now_seconds();

  std::vector<double> g_full(n);
  estimator->eval({0, n}, all, g_full);
  double t3 = now_seconds();

  // Collapse directions and multiplicities into one undirected edge set.
  std::vector<uint64_t> pairs;
  pairs.reserve(counted.size());
  size_t self_pairs = 0;
  for (const auto& c : counted) {
    if (c.query == c.source) {
      self_pairs += c.count;
      continue;
    }
    uint32_t a = std::min(c.query, c.source);
    uint32_t b = std::max(c.query, c.source);
    pairs.push_back((uint64_t(a) << 32) | b);
  }
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

  GraphBuilder builder(n, /*strict=*/true);
  builder.reserve(pairs.size());
  if (estimates) {
    estimates->clear();
    estimates->reserve(pairs.size());
  }
  size_t underflow_edges = 0;
  const double roundsf = static_cast<double>(L);
  for (uint64_t key : pairs) {
    uint32_t i = static_cast<uint32_t>(key >> 32);
    uint32_t j = static_cast<uint32_t>(key & 0xffffffffu);
    double k_ij = kernel(ds.point(i), ds.point(j), ds.dim());
    if (!(k_ij >= 1e-300)) {
      ++underflow_edges;
      continue;
    }
    double p_i = std::min(roundsf * k_ij / g_full[i], 1.0);
    double p_j = std::min(roundsf * k_ij / g_full[j], 1.0);
    double p_hat = p_i + p_j - p_i * p_j;
    builder.add_edge(i, j, k_ij / p_hat);
    if (estimates)
      estimates->push_back({i, j, k_ij, g_full[i], g_full[j], p_i, p_j, p_hat});
  }
  WeightedGraph graph = builder.build();
  double t4 = now_seconds();

  if (graph.num_edges() > size_t(n) * L)
    throw NumericError("sparsity invariant violated: more than n*L edges");

  if (report) {
    report->n = n;
    report->rounds = L;
    report->epsilon = estimator->epsilon();
    report->backend = estimator->backend_name();
    report->sampled_pairs = counted.size();
    report->self_pairs_discarded = self_pairs;
    report->underflow_edges_discarded = underflow_edges;
    report->edge_count = graph.num_edges();
    report->degenerate_draws = diag.degenerate_draws;
    report->estimator_build_seconds = t1 - t0;
    report->sampling_seconds = t2 - t1;
    report->degree_kde_seconds = t3 - t2;
    report->weighting_seconds = t4 - t3;
    report->total_seconds = t4 - t0;
    report->estimator_bytes = estimator->memory_bytes();
    report->graph_bytes = graph.memory_bytes();
  }
  return graph;
}

WeightedGraph build_full_graph(const Dataset& ds, const Kernel& kernel,
                               size_t oracle_cap) {
  const uint32_t n = ds.size();
  if (n > oracle_cap)
    throw OracleCapExceeded("explicit graph: n = " + std::to_string(n) +
                            " exceeds oracle cap " +
                            std::to_string(oracle_cap));
  const uint32_t d = ds.dim();

  // Count surviving edges per row first so the edge array is filled in
  // place without an extra copy.
  std::vector<size_t> row_count(n, 0);
  parallel_for(0, n, [&](size_t i) {
    const double* xi = ds.point(static_cast<uint32_t>(i));
    size_t cnt = 0;
    for (uint32_t j = static_cast<uint32_t>(i) + 1; j < n; ++j)
      if (kernel(xi, ds.point(j), d) >= 1e-300) ++cnt;
    row_count[i] = cnt;
  });
  std::vector<size_t> row_off(n + 1, 0);
  for (uint32_t i = 0; i < n; ++i) row_off[i + 1] = row_off[i] + row_count[i];

  std::vector<Edge> edges(row_off[n]);
  parallel_for(0, n, [&](size_t i) {
    const double* xi = ds.point(static_cast<uint32_t>(i));
    size_t at = row_off[i];
    for (uint32_t j = static_cast<uint32_t>(i) + 1; j < n; ++j) {
      double w = kernel(xi, ds.point(j), d);
      if (w >= 1e-300) edges[at++] = {static_cast<uint32_t>(i), j, w};
    }
  });

  GraphBuilder builder(n, /*strict=*/true);
  builder.adopt_sorted_unique(std::move(edges));
  return builder.build();
}

WeightedGraph sz_sparsify(const WeightedGraph& g, uint32_t k, double lambda_k1,
                          double C, uint64_t seed, LogBase log_base) {
  (void)k;  // the estimate lambda_k1 carries the k dependence
  if (!(lambda_k1 > 0.0) || !(C > 0.0))
    throw InvalidConfig("sz_sparsify needs positive C and lambda");
  const uint32_t n = g.num_vertices();
  double logn = std::max(log_n(std::max<uint32_t>(n, 2), log_base), 1.0);
  double scale = C * logn / lambda_k1;

  GraphBuilder builder(n);
  builder.reserve(g.num_edges() / 4);
  RngStream rng = RngStream::keyed(seed, 0x5a9cf3b871e04d2bULL);
  for (const Edge& e : g.edges()) {
    double pu = std::min(scale * e.w / g.degree(e.u), 1.0);
    double pv = std::min(scale * e.w / g.degree(e.v), 1.0);
    double pe = pu + pv - pu * pv;
    if (rng.next_double() < pe) builder.add_edge(e.u, e.v, e.w / pe);
  }
  return builder.build();
}

namespace {

GraphSummary summarize(const std::string& name, const WeightedGraph& g,
                       const WeightedGraph& full, uint32_t k, uint64_t seed,
                       const ClusterLabels* reference) {
  GraphSummary s;
  s.name = name;
  s.edge_count = g.num_edges();

  uint32_t q = std::min<uint32_t>(k + 2, g.num_vertices());
  EigenOptions eopts;
  eopts.seed = seed;
  EigenResult eig = smallest_eigenpairs(g, q, eopts);
  s.eigenvalues = eig.eigenvalues;

  ClusterLabels part = spectral_cluster(g, k, seed);
  MetricReport mr = conductance_report(g, part);
  s.cluster_conductances = mr.per_cluster_conductance;
  s.max_conductance = mr.max_conductance;
  if (reference) s.ari_vs_reference = adjusted_rand_index(part, *reference);

  std::vector<double> ratio(g.num_vertices());
  for (uint32_t v = 0; v < g.num_vertices(); ++v)
    ratio[v] = g.degree(v) / full.degree(v);
  std::sort(ratio.begin(), ratio.end());
  s.min_degree_ratio_vs_full = ratio.front();
  s.median_degree_ratio_vs_full = ratio[ratio.size() / 2];
  s.max_degree_ratio_vs_full = ratio.back();
  return s;
}

nlohmann::json summary_json(const GraphSummary& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["edge_count"] = s.edge_count;
  j["eigenvalues"] = s.eigenvalues;
  j["cluster_conductances"] = s.cluster_conductances;
  j["max_conductance"] = s.max_conductance;
  if (s.ari_vs_reference > -2.0) j["ari_vs_reference"] = s.ari_vs_reference;
  j["degree_ratio_vs_full"] = {
      {"min", s.min_degree_ratio_vs_full},
      {"median", s.median_degree_ratio_vs_full},
      {"max", s.max_degree_ratio_vs_full},
  };
  return j;
}

}  // namespace

std::string CompareReport::to_json() const {
  nlohmann::json j;
  j["n"] = n;
  j["k"] = k;
  j["full"] = summary_json(full);
  j["fast"] = summary_json(fast);
  j["sz"] = summary_json(sz);
  return j.dump(2);
}

CompareReport compare_sparsifiers(const Dataset& ds, const Kernel& kernel,
                                  const SparsifierConfig& config, uint32_t k,
                                  const ClusterLabels* reference,
                                  size_t oracle_cap) {
  CompareReport rep;
  rep.n = ds.size();
  rep.k = k;

  WeightedGraph full = build_full_graph(ds, kernel, oracle_cap);
  WeightedGraph fast = build_similarity_graph(ds, kernel, config);
  WeightedGraph sz = sz_sparsify(full, k, config.lambda_k1_estimate, config.C,
                                 config.seed, config.log_base);

  rep.full = summarize("full", full, full, k, config.seed, reference);
  rep.fast = summarize("fast", fast, full, k, config.seed, reference);
  rep.sz = summarize("sz", sz, full, k, config.seed, reference);
  return rep;
}

}  // namespace fsg
