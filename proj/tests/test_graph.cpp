#include <doctest.h>

#include <cmath>
#include <sstream>

#include "fsg/common.hpp"
#include "fsg/graph.hpp"
#include "fsg/rng.hpp"
#include "support.hpp"

using namespace fsg;

TEST_SUITE_BEGIN("graph");

namespace {

// Two unit triangles joined by one bridge of weight 0.5.
WeightedGraph bridge_graph() {
  GraphBuilder b(6);
  b.add_edge(0, 1, 1.0);
  b.add_edge(1, 2, 1.0);
  b.add_edge(0, 2, 1.0);
  b.add_edge(3, 4, 1.0);
  b.add_edge(4, 5, 1.0);
  b.add_edge(3, 5, 1.0);
  b.add_edge(2, 3, 0.5);
  return b.build();
}

WeightedGraph random_graph(uint32_t n, double p, uint64_t seed,
                           bool ensure_degrees = true) {
  RngStream rng = RngStream::keyed(seed, 0x67726170ULL);
  GraphBuilder b(n);
  for (uint32_t u = 0; u < n; ++u)
    for (uint32_t v = u + 1; v < n; ++v)
      if (rng.next_double() < p) b.add_edge(u, v, 0.1 + rng.next_double());
  if (ensure_degrees)
    for (uint32_t v = 1; v < n; ++v) b.add_edge(v - 1, v, 0.05);
  return b.build();
}

}  // namespace

TEST_CASE("builder merges duplicates and sorts") {
  GraphBuilder b(4);
  b.add_edge(2, 1, 0.5);
  b.add_edge(1, 2, 0.25);
  b.add_edge(0, 3, 1.0);
  WeightedGraph g = b.build();
  REQUIRE(g.num_edges() == 2);
  CHECK(g.edges()[0].u == 0);
  CHECK(g.edges()[0].v == 3);
  CHECK(g.edges()[1].w == 0.75);
  CHECK(g.degree(1) == doctest::Approx(0.75));
}

TEST_CASE("strict builder rejects duplicates") {
  GraphBuilder b(3, /*strict=*/true);
  b.add_edge(0, 1, 1.0);
  b.add_edge(1, 0, 1.0);
  CHECK_THROWS_AS(b.build(), InvalidConfig);
}

TEST_CASE("builder validates edges") {
  GraphBuilder b(3);
  CHECK_THROWS_AS(b.add_edge(1, 1, 1.0), InvalidConfig);
  CHECK_THROWS_AS(b.add_edge(0, 3, 1.0), InvalidConfig);
  CHECK_THROWS_AS(b.add_edge(0, 1, 0.0), InvalidConfig);
  CHECK_THROWS_AS(b.add_edge(0, 1, -2.0), InvalidConfig);
}

TEST_CASE("degrees recomputable from edges") {
  WeightedGraph g = random_graph(60, 0.2, 5);
  std::vector<double> deg(g.num_vertices(), 0.0);
  for (const Edge& e : g.edges()) {
    deg[e.u] += e.w;
    deg[e.v] += e.w;
  }
  for (uint32_t v = 0; v < g.num_vertices(); ++v)
    CHECK(g.degree(v) == doctest::Approx(deg[v]).epsilon(1e-9));
}

TEST_CASE("volume examples") {
  GraphBuilder b(2);
  b.add_edge(0, 1, 1.0);
  WeightedGraph g = b.build();
  CHECK(volume(g, VertexSet::from_indices(2, {0})) == 1.0);

  WeightedGraph r = random_graph(40, 0.3, 6);
  std::vector<uint32_t> everything(r.num_vertices());
  for (uint32_t v = 0; v < r.num_vertices(); ++v) everything[v] = v;
  CHECK(volume(r, VertexSet::from_indices(r.num_vertices(), everything)) ==
        doctest::Approx(2.0 * r.total_weight()).epsilon(1e-12));

  RngStream rng = RngStream::keyed(77, 2);
  std::vector<uint32_t> some;
  double expect = 0.0;
  for (uint32_t v = 0; v < r.num_vertices(); ++v)
    if (rng.next_double() < 0.4) {
      some.push_back(v);
      expect += r.degree(v);
    }
  CHECK(volume(r, VertexSet::from_indices(r.num_vertices(), some)) ==
        doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("boundary and conductance on the bridge graph") {
  WeightedGraph g = bridge_graph();
  VertexSet triangle = VertexSet::from_indices(6, {0, 1, 2});
  CHECK(boundary(g, triangle) == doctest::Approx(0.5));
  // vol(triangle) = 2 + 2 + 2.5 = 6.5 so phi = 0.5 / 6.5.
  CHECK(conductance(g, triangle) ==
        doctest::Approx(0.07692307692307693).epsilon(1e-12));

  std::vector<uint32_t> everything = {0, 1, 2, 3, 4, 5};
  CHECK(boundary(g, VertexSet::from_indices(6, everything)) == 0.0);

  GraphBuilder b(2);
  b.add_edge(0, 1, 1.0);
  WeightedGraph single = b.build();
  CHECK(conductance(single, VertexSet::from_indices(2, {0})) == 1.0);
}

TEST_CASE("conductance rejects zero-volume sets") {
  WeightedGraph g = bridge_graph();
  CHECK_THROWS_AS(conductance(g, VertexSet(6)), EmptyOrIsolated);
}

TEST_CASE("k-way expansion of a given partition") {
  WeightedGraph g = bridge_graph();
  std::vector<VertexSet> natural = {VertexSet::from_indices(6, {0, 1, 2}),
                                    VertexSet::from_indices(6, {3, 4, 5})};
  CHECK(kway_expansion_of_partition(g, natural) ==
        doctest::Approx(0.07692307692307693).epsilon(1e-12));

  std::vector<VertexSet> whole = {
      VertexSet::from_indices(6, {0, 1, 2, 3, 4, 5})};
  CHECK(kway_expansion_of_partition(g, whole) == 0.0);

  GraphBuilder b(4);
  b.add_edge(0, 1, 1.0);
  b.add_edge(2, 3, 1.0);
  WeightedGraph cliques = b.build();
  std::vector<VertexSet> split = {VertexSet::from_indices(4, {0, 1}),
                                  VertexSet::from_indices(4, {2, 3})};
  CHECK(kway_expansion_of_partition(cliques, split) == 0.0);

  std::vector<VertexSet> overlapping = {
      VertexSet::from_indices(6, {0, 1, 2}),
      VertexSet::from_indices(6, {2, 3, 4, 5})};
  CHECK_THROWS_AS(kway_expansion_of_partition(g, overlapping),
                  InvalidPartition);
  std::vector<VertexSet> missing = {VertexSet::from_indices(6, {0, 1})};
  CHECK_THROWS_AS(kway_expansion_of_partition(g, missing), InvalidPartition);
}

TEST_CASE("normalized laplacian stationary vector and PSD") {
  WeightedGraph g = random_graph(50, 0.15, 8);
  NormalizedLaplacian N(g);

  // N (D^{1/2} 1) = 0.
  std::vector<double> x(g.num_vertices()), y(g.num_vertices());
  for (uint32_t v = 0; v < g.num_vertices(); ++v)
    x[v] = std::sqrt(g.degree(v));
  N.apply(x.data(), y.data());
  for (double v : y) CHECK(std::fabs(v) <= 1e-10);

  RngStream rng = RngStream::keyed(6, 6);
  for (int trial = 0; trial < 1000; ++trial) {
    double norm = 0.0;
    for (auto& v : x) {
      v = rng.next_normal();
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (auto& v : x) v /= norm;
    N.apply(x.data(), y.data());
    double quad = 0.0;
    for (uint32_t v = 0; v < g.num_vertices(); ++v) quad += x[v] * y[v];
    CHECK(quad >= -1e-9);
    CHECK(quad <= 2.0 + 1e-9);
  }
}

TEST_CASE("normalized laplacian rejects isolated vertices") {
  GraphBuilder b(3);
  b.add_edge(0, 1, 1.0);  // vertex 2 isolated
  WeightedGraph g = b.build();
  CHECK_THROWS_AS(NormalizedLaplacian{g}, IsolatedVertex);
}

TEST_CASE("matvec agrees with the dense operator") {
  WeightedGraph g = random_graph(80, 0.1, 12);
  NormalizedLaplacian N(g);
  auto dense = testsupport::dense_normalized_laplacian(g);

  RngStream rng = RngStream::keyed(13, 1);
  std::vector<double> x(g.num_vertices()), y(g.num_vertices());
  for (int trial = 0; trial < 20; ++trial) {
    for (auto& v : x) v = rng.next_normal();
    N.apply(x.data(), y.data());
    Eigen::Map<Eigen::VectorXd> xv(x.data(), g.num_vertices());
    Eigen::VectorXd expect = dense * xv;
    for (uint32_t v = 0; v < g.num_vertices(); ++v)
      CHECK(y[v] == doctest::Approx(expect(v)).epsilon(1e-10));
  }
}

TEST_CASE("component count matches the zero eigenvalue multiplicity") {
  for (uint64_t seed = 1; seed <= 8; ++seed) {
    uint32_t n = 40 + 25 * uint32_t(seed);
    WeightedGraph g = random_graph(n, 0.5 / n, seed, false);
    uint32_t count = connected_component_count(g);
    bool any_isolated = false;
    for (uint32_t v = 0; v < n; ++v)
      if (!(g.degree(v) > 0.0)) any_isolated = true;
    if (any_isolated) continue;
    auto spec = testsupport::dense_spectrum(g);
    uint32_t zeros = 0;
    for (double l : spec)
      if (l <= 1e-8) ++zeros;
    CHECK(zeros == count);
  }
}

TEST_CASE("edge list serialization round-trips exactly") {
  WeightedGraph g = random_graph(30, 0.25, 21);
  std::stringstream ss;
  write_edge_list(ss, g);
  WeightedGraph back = read_edge_list(ss);
  REQUIRE(back.num_vertices() == g.num_vertices());
  REQUIRE(back.num_edges() == g.num_edges());
  for (size_t i = 0; i < g.num_edges(); ++i) {
    CHECK(back.edges()[i].u == g.edges()[i].u);
    CHECK(back.edges()[i].v == g.edges()[i].v);
    CHECK(back.edges()[i].w == g.edges()[i].w);  // bit-exact via %.17g
  }
}

TEST_SUITE_END();
