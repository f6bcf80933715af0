#include "fsg/eval.hpp"

#include <algorithm>
#include <unordered_map>

#include <json.hpp>

#include "fsg/common.hpp"

namespace fsg {

namespace {

using uint128 = unsigned __int128;

uint128 comb2(uint64_t x) { return uint128(x) * (x - (x > 0 ? 1 : 0)) / 2; }

struct PairTally {
  uint128 sum_cells;  // sum over contingency cells of C(n_ij, 2)
  uint128 sum_a;      // sum over clusters of a of C(a_i, 2)
  uint128 sum_b;
  uint128 total;      // C(n, 2)
};

PairTally tally(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  if (a.size() != b.size())
    throw LengthMismatch("labelings have different lengths");
  if (a.size() < 2)
    throw LengthMismatch("pair metrics need at least two points");

  std::unordered_map<uint32_t, uint64_t> count_a, count_b;
  std::unordered_map<uint64_t, uint64_t> cells;
  cells.reserve(a.size());
  for (size_t i = 0; i < a.size(); ++i) {
    count_a[a[i]]++;
    count_b[b[i]]++;
    cells[(uint64_t(a[i]) << 32) | b[i]]++;
  }

  PairTally t{0, 0, 0, comb2(a.size())};
  for (auto& kv : cells) t.sum_cells += comb2(kv.second);
  for (auto& kv : count_a) t.sum_a += comb2(kv.second);
  for (auto& kv : count_b) t.sum_b += comb2(kv.second);
  return t;
}

long double to_ld(uint128 x) { return static_cast<long double>(x); }

}  // namespace

double rand_index(std::span<const uint32_t> a, std::span<const uint32_t> b) {
  PairTally t = tally(a, b);
  // agreements = C(n,2) + 2 * sum_cells - sum_a - sum_b
  uint128 agree = t.total + 2 * t.sum_cells - t.sum_a - t.sum_b;
  return static_cast<double>(to_ld(agree) / to_ld(t.total));
}

double rand_index(const ClusterLabels& a, const ClusterLabels& b) {
  return rand_index(std::span<const uint32_t>(a.labels),
                    std::span<const uint32_t>(b.labels));
}

double adjusted_rand_index(std::span<const uint32_t> a,
                           std::span<const uint32_t> b) {
  PairTally t = tally(a, b);
  // ARI = (S - AB/T) / ((A+B)/2 - AB/T), kept in integers:
  //   2 (S T - A B) / (T (A + B) - 2 A B)
  uint128 st = t.sum_cells * t.total;
  uint128 ab = t.sum_a * t.sum_b;
  long double numer = st >= ab ? 2.0L * to_ld(st - ab) : -2.0L * to_ld(ab - st);
  uint128 den_pos = t.total * (t.sum_a + t.sum_b);
  uint128 den_neg = 2 * ab;
  if (den_pos == den_neg) return 1.0;  // both partitions trivial: identical
  long double den = den_pos >= den_neg ? to_ld(den_pos - den_neg)
                                       : -to_ld(den_neg - den_pos);
  return static_cast<double>(numer / den);
}

double adjusted_rand_index(const ClusterLabels& a, const ClusterLabels& b) {
  return adjusted_rand_index(std::span<const uint32_t>(a.labels),
                             std::span<const uint32_t>(b.labels));
}

std::string MetricReport::to_json() const {
  nlohmann::json j;
  if (rand_index >= 0.0) j["rand_index"] = rand_index;
  if (adjusted_rand_index >= -1.0) j["adjusted_rand_index"] = adjusted_rand_index;
  j["per_cluster_conductance"] = per_cluster_conductance;
  j["max_conductance"] = max_conductance;
  return j.dump(2);
}

MetricReport conductance_report(const WeightedGraph& g,
                                const ClusterLabels& labels) {
  if (labels.size() != g.num_vertices())
    throw LengthMismatch("labels do not cover all vertices");
  const uint32_t k = labels.k;
  std::vector<double> vol(k, 0.0), cut(k, 0.0);
  std::vector<uint64_t> members(k, 0);
  for (uint32_t v = 0; v < g.num_vertices(); ++v) {
    uint32_t c = labels.labels[v];
    if (c >= k) throw InvalidPartition("label value out of range");
    vol[c] += g.degree(v);
    members[c]++;
  }
  for (uint32_t c = 0; c < k; ++c)
    if (members[c] == 0) throw InvalidPartition("empty cluster in labeling");
  for (const Edge& e : g.edges()) {
    uint32_t cu = labels.labels[e.u], cv = labels.labels[e.v];
    if (cu != cv) {
      cut[cu] += e.w;
      cut[cv] += e.w;
    }
  }

  MetricReport rep;
  rep.per_cluster_conductance.resize(k);
  for (uint32_t c = 0; c < k; ++c) {
    if (!(vol[c] > 0.0))
      throw EmptyOrIsolated("cluster " + std::to_string(c) + " has volume 0");
    rep.per_cluster_conductance[c] = cut[c] / vol[c];
    rep.max_conductance =
        std::max(rep.max_conductance, rep.per_cluster_conductance[c]);
  }
  return rep;
}

}  // namespace fsg
