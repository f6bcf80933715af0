#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fsg/common.hpp"
#include "fsg/eval.hpp"
#include "fsg/graph.hpp"
#include "fsg/rng.hpp"
#include "fsg/spectral.hpp"
#include "support.hpp"

using namespace fsg;

TEST_SUITE_BEGIN("spectral");

namespace {

WeightedGraph random_connected_graph(uint32_t n, double p, uint64_t seed) {
  RngStream rng = RngStream::keyed(seed, 0x7370ULL);
  GraphBuilder b(n);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v)
      if (rng.next_double() < p) b.add_edge(u, v, 0.1 + rng.next_double());
  for (uint32_t v = 1; v < n; ++v) b.add_edge(v - 1, v, 0.05);
  return b.build();
}

WeightedGraph two_cliques(uint32_t half) {
  GraphBuilder b(2 * half);
  for (uint32_t u = 0; u < half; ++u)
    for (uint32_t v = u + 1; v < half; ++v) {
      b.add_edge(u, v, 1.0);
      b.add_edge(half + u, half + v, 1.0);
    }
  return b.build();
}

WeightedGraph complete_graph(uint32_t n) {
  GraphBuilder b(n);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v) b.add_edge(u, v, 1.0);
  return b.build();
}

}  // namespace

TEST_CASE("single edge has spectrum {0, 2}") {
  GraphBuilder b(2);
  b.add_edge(0, 1, 1.0);
  WeightedGraph g = b.build();
  EigenResult eig = smallest_eigenpairs(g, 2);
  CHECK(eig.eigenvalues[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(eig.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-10));
  CHECK(eig.residuals[0] <= 1e-8);
  CHECK(eig.residuals[1] <= 1e-8);
}

TEST_CASE("two disjoint triangles give a double zero") {
  GraphBuilder b(6);
  for (auto [u, v] : {std::pair{0, 1}, {1, 2}, {0, 2}, {3, 4}, {4, 5}, {3, 5}})
    b.add_edge(u, v, 1.0);
  WeightedGraph g = b.build();
  EigenResult eig = smallest_eigenpairs(g, 2);
  CHECK(std::fabs(eig.eigenvalues[0]) <= 1e-8);
  CHECK(std::fabs(eig.eigenvalues[1]) <= 1e-8);
}

TEST_CASE("complete graph eigenvalues are 0 and n/(n-1)") {
  for (uint32_t n : {5u, 12u}) {
    WeightedGraph g = complete_graph(n);
    EigenResult eig = smallest_eigenpairs(g, n);
    CHECK(std::fabs(eig.eigenvalues[0]) <= 1e-9);
    for (uint32_t i = 1; i < n; ++i)
      CHECK(eig.eigenvalues[i] ==
            doctest::Approx(double(n) / (n - 1)).epsilon(1e-8));
  }
}

TEST_CASE("matches the dense solver on random graphs") {
  for (uint64_t seed : {3ull, 4ull, 5ull}) {
    uint32_t n = 60 + 80 * uint32_t(seed);
    WeightedGraph g = random_connected_graph(n, 0.05, seed);
    auto dense = testsupport::dense_spectrum(g);
    uint32_t q = 6;
    EigenResult eig = smallest_eigenpairs(g, q);
    for (uint32_t i = 0; i < q; ++i) {
      CHECK(std::fabs(eig.eigenvalues[i] - dense[i]) <= 1e-6);
      CHECK(eig.residuals[i] <= 1e-6);
    }
    // Orthonormality of returned vectors.
    for (uint32_t i = 0; i < q; ++i)
      for (uint32_t j = i; j < q; ++j) {
        double d = 0.0;
        for (uint32_t v = 0; v < n; ++v)
          d += eig.vector(i)[v] * eig.vector(j)[v];
        CHECK(std::fabs(d - (i == j ? 1.0 : 0.0)) <= 1e-8);
      }
  }
}

TEST_CASE("eigenvalues stay in [0, 2] within tolerance") {
  WeightedGraph g = random_connected_graph(150, 0.08, 17);
  EigenResult eig = smallest_eigenpairs(g, 10);
  for (double l : eig.eigenvalues) {
    CHECK(l >= -1e-8);
    CHECK(l <= 2.0 + 1e-8);
  }
  CHECK(std::is_sorted(eig.eigenvalues.begin(), eig.eigenvalues.end()));
}

TEST_CASE("Rayleigh quotient of any deflated vector dominates lambda_q") {
  WeightedGraph g = random_connected_graph(120, 0.1, 23);
  uint32_t q = 4;
  EigenResult eig = smallest_eigenpairs(g, q);
  NormalizedLaplacian N(g);
  RngStream rng = RngStream::keyed(55, 3);
  std::vector<double> x(g.num_vertices()), y(g.num_vertices());
  for (int trial = 0; trial < 50; ++trial) {
    for (auto& v : x) v = rng.next_normal();
    // Orthogonalize against the first q-1 returned vectors.
    for (uint32_t i = 0; i + 1 < q; ++i) {
      double d = 0.0;
      for (uint32_t v = 0; v < g.num_vertices(); ++v)
        d += x[v] * eig.vector(i)[v];
      for (uint32_t v = 0; v < g.num_vertices(); ++v)
        x[v] -= d * eig.vector(i)[v];
    }
    double nn = 0.0;
    for (double v : x) nn += v * v;
    if (nn < 1e-12) continue;
    N.apply(x.data(), y.data());
    double quad = 0.0;
    for (uint32_t v = 0; v < g.num_vertices(); ++v) quad += x[v] * y[v];
    CHECK(eig.eigenvalues[q - 1] <= quad / nn + 1e-6);
  }
}

TEST_CASE("NoConvergence carries diagnostics when the budget is tiny") {
  WeightedGraph g = random_connected_graph(400, 0.02, 31);
  EigenOptions opts;
  opts.max_matvecs = 3;
  opts.tol = 1e-14;
  CHECK_THROWS_AS(smallest_eigenpairs(g, 5, opts), NoConvergence);
}

TEST_CASE("requesting more pairs than vertices is rejected") {
  WeightedGraph g = complete_graph(4);
  CHECK_THROWS_AS(smallest_eigenpairs(g, 5), InvalidConfig);
  CHECK_THROWS_AS(smallest_eigenpairs(g, 0), InvalidConfig);
}

TEST_CASE("embedding of two cliques collapses to two unit rows") {
  WeightedGraph g = two_cliques(6);
  EigenResult eig = smallest_eigenpairs(g, 2);
  auto rows = spectral_embed(eig, 2);
  // All rows are unit length and take exactly two distinct values.
  std::vector<std::pair<double, double>> distinct;
  for (uint32_t v = 0; v < 12; ++v) {
    double a = rows[v * 2], b = rows[v * 2 + 1];
    CHECK(std::fabs(a * a + b * b - 1.0) <= 1e-9);
    bool found = false;
    for (auto& d : distinct)
      if (std::fabs(d.first - a) + std::fabs(d.second - b) < 1e-6) found = true;
    if (!found) distinct.push_back({a, b});
  }
  CHECK(distinct.size() == 2);
}

TEST_CASE("k = 1 embedding rows are all +-1") {
  WeightedGraph g = complete_graph(7);
  EigenResult eig = smallest_eigenpairs(g, 1);
  auto rows = spectral_embed(eig, 1);
  for (double v : rows) CHECK(std::fabs(std::fabs(v) - 1.0) <= 1e-10);
}

TEST_CASE("kmeans recovers trivial configurations") {
  // k = n distinct points: each its own cluster, zero cost.
  std::vector<double> pts = {0, 0, 1, 0, 0, 1, 5, 5};
  KMeansResult r = kmeans(pts, 4, 2, 4);
  CHECK(r.cost == 0.0);
  std::vector<bool> seen(4, false);
  for (uint32_t l : r.labels.labels) seen[l] = true;
  CHECK(std::all_of(seen.begin(), seen.end(), [](bool b) { return b; }));

  // Two far-separated 2-point groups for any seed.
  std::vector<double> far = {0, 0, 0.1, 0, 100, 100, 100.1, 100};
  for (uint64_t seed : {1ull, 2ull, 99ull}) {
    KMeansOptions opts;
    opts.seed = seed;
    KMeansResult g = kmeans(far, 4, 2, 2, opts);
    CHECK(g.labels.labels[0] == g.labels.labels[1]);
    CHECK(g.labels.labels[2] == g.labels.labels[3]);
    CHECK(g.labels.labels[0] != g.labels.labels[2]);
  }
}

TEST_CASE("kmeans cost never increases across Lloyd iterations") {
  auto ds = testsupport::random_dataset(300, 3, 77);
  KMeansOptions opts;
  opts.restarts = 3;
  std::vector<double> trace;
  kmeans(ds.raw(), 300, 3, 5, opts, &trace);
  REQUIRE(!trace.empty());
  for (size_t i = 1; i < trace.size(); ++i) CHECK(trace[i] <= trace[i - 1] + 1e-12);
}

TEST_CASE("kmeans rejects degenerate input") {
  std::vector<double> pts = {1.0, 1.0, 1.0, 1.0, 1.0, 1.0};  // 3 equal rows
  CHECK_THROWS_AS(kmeans(pts, 3, 2, 2), DegenerateInput);
}

TEST_CASE("spectral clustering splits two cliques exactly") {
  WeightedGraph g = two_cliques(8);
  ClusterLabels labels = spectral_cluster(g, 2, 7);
  for (uint32_t v = 1; v < 8; ++v) CHECK(labels.labels[v] == labels.labels[0]);
  for (uint32_t v = 9; v < 16; ++v) CHECK(labels.labels[v] == labels.labels[8]);
  CHECK(labels.labels[0] != labels.labels[8]);
}

TEST_CASE("higher-order Cheeger lower bound holds for computed partitions") {
  for (uint64_t seed : {2ull, 9ull}) {
    WeightedGraph g = random_connected_graph(90, 0.08, seed);
    uint32_t k = 3;
    ClusterLabels labels = spectral_cluster(g, k, seed);
    EigenResult eig = smallest_eigenpairs(g, k);
    std::vector<VertexSet> parts;
    for (uint32_t c = 0; c < k; ++c)
      parts.push_back(VertexSet::from_labels(labels, c));
    double expansion = kway_expansion_of_partition(g, parts);
    CHECK(eig.eigenvalues[k - 1] / 2.0 <= expansion + 1e-9);
  }
}

TEST_CASE("results are independent of the worker count") {
  WeightedGraph g = random_connected_graph(200, 0.05, 41);
  set_worker_count(1);
  EigenResult a = smallest_eigenpairs(g, 4);
  ClusterLabels la = spectral_cluster(g, 3, 5);
  set_worker_count(2);
  EigenResult b = smallest_eigenpairs(g, 4);
  ClusterLabels lb = spectral_cluster(g, 3, 5);
  set_worker_count(0);
  for (uint32_t i = 0; i < 4; ++i)
    CHECK(a.eigenvalues[i] == b.eigenvalues[i]);  // bitwise
  CHECK(la.labels == lb.labels);
}

TEST_CASE("eigen gap scan exposes cluster counts") {
  // Path with 2 vertices: gap between 0 and 2.
  GraphBuilder b(2);
  b.add_edge(0, 1, 1.0);
  EigenGapScan scan = eigen_gap_scan(b.build(), 2);
  CHECK(std::fabs(scan.eigenvalues[0]) <= 1e-10);
  CHECK(scan.eigenvalues[1] == doctest::Approx(2.0).epsilon(1e-9));

  // Complete graph: no gap after lambda_2.
  WeightedGraph kg = complete_graph(30);
  EigenGapScan flat = eigen_gap_scan(kg, 5);
  for (uint32_t i = 1; i + 1 < 5; ++i)
    CHECK(flat.ratios[i] == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_SUITE_END();
