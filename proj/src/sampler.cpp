#include "fsg/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <unordered_map>

#include "fsg/common.hpp"
#include "fsg/fastmath.hpp"
#include "fsg/rng.hpp"

// Level-synchronous implementation of the recursive halving sampler. Every
// query carries a ticket count; at a node the tickets split binomially with
// p = g_{X1} / (g_{X1} + g_{X2}), which reproduces the joint law of running
// the single-ticket recursion independently per round. Entries for one node
// stay contiguous, so the two child KDE sums are issued as one batched query
// per node. Routing streams are keyed by (seed, node range, query), making
// the output independent of worker scheduling.

namespace fsg {

namespace {

constexpr uint64_t kRouteTag = 0x88b4f8a3c2d1e5f7ULL;

struct Entry {
  uint32_t first;
  uint32_t last;
  uint32_t query;
  uint32_t tickets;
};

double inline_range_sum(const Dataset& ds, const Kernel& kernel,
                        uint32_t first, uint32_t last, const double* y,
                        double floor) {
  double sum = 0.0, comp = 0.0;
  for (uint32_t j = first; j < last; ++j) {
    double term = kernel(y, ds.point(j), ds.dim()) - comp;
    double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return std::max(sum, floor);
}

// Budgeted variant for approximate backends; error far below any epsilon.
double inline_range_sum_fast(const Dataset& ds, double inv_h2, uint32_t first,
                             uint32_t last, const double* y, double floor) {
  const uint32_t d = ds.dim();
  const uint32_t m = last - first;
  thread_local std::vector<double> d2_buf;
  d2_buf.resize(m);
  if (d == 2) {
    const double* x = ds.point(first);
    const double y0 = y[0], y1 = y[1];
    for (uint32_t j = 0; j < m; ++j, x += 2) {
      double t0 = y0 - x[0], t1 = y1 - x[1];
      d2_buf[j] = (t0 * t0 + t1 * t1) * inv_h2;
    }
  } else {
    for (uint32_t j = 0; j < m; ++j) {
      const double* x = ds.point(first + j);
      double s2 = 0.0;
      for (uint32_t a = 0; a < d; ++a) {
        double t = y[a] - x[a];
        s2 += t * t;
      }
      d2_buf[j] = s2 * inv_h2;
    }
  }
  return std::max(fast_exp_neg_sum(d2_buf.data(), m), floor);
}

}  // namespace

std::vector<CountedNeighborSample> sample_neighbors_counted(
    std::span<const uint32_t> queries, const KdeEstimator& estimator,
    uint32_t rounds, uint64_t seed, SampleDiagnostics* diagnostics,
    const SamplerOptions& options) {
  const Dataset& ds = estimator.data();
  const uint32_t n = ds.size();
  const Kernel& kernel = estimator.kernel();
  const double floor = estimator.sum_floor();
  if (rounds == 0) throw InvalidConfig("need at least one sampling round");
  for (uint32_t q : queries)
    if (q >= n) throw InvalidConfig("query index out of range");

  // Duplicate query indices share a routing stream, so merging their
  // tickets changes nothing observable.
  std::vector<Entry> cur;
  {
    std::unordered_map<uint32_t, uint64_t> merged;
    for (uint32_t q : queries) merged[q] += rounds;
    cur.reserve(merged.size());
    std::vector<uint32_t> keys;
    keys.reserve(merged.size());
    for (auto& kv : merged) keys.push_back(kv.first);
    std::sort(keys.begin(), keys.end());
    for (uint32_t q : keys) {
      uint64_t t = merged[q];
      if (t > 0xffffffffULL)
        throw InvalidConfig("total rounds per query exceeds 2^32");
      cur.push_back({0, n, q, static_cast<uint32_t>(t)});
    }
  }

  std::vector<CountedNeighborSample> out;
  std::vector<Entry> next;
  std::vector<double> g1, g2;
  std::vector<uint32_t> batch_targets;
  std::vector<Entry> left_buf, right_buf;

  const bool trace = std::getenv("FSG_SAMPLER_TRACE") != nullptr;
  uint32_t level_no = 0;
  double t_batch = 0.0, t_inline = 0.0, t_route = 0.0;
  while (!cur.empty()) {
    double level_t0 = now_seconds();
    if (diagnostics) {
      diagnostics->entries_per_level.push_back(cur.size());
      uint64_t tickets = 0;
      for (const Entry& e : cur) tickets += e.tickets;
      diagnostics->tickets_per_level.push_back(tickets);
    }

    g1.assign(cur.size(), 0.0);
    g2.assign(cur.size(), 0.0);

    // Pass 1: child sums per entry. Groups of entries sharing a node are
    // contiguous; large nodes go through the estimator as one batch.
    size_t i = 0;
    std::vector<std::pair<size_t, size_t>> inline_spans;
    while (i < cur.size()) {
      size_t j = i;
      while (j < cur.size() && cur[j].first == cur[i].first &&
             cur[j].last == cur[i].last)
        ++j;
      uint32_t first = cur[i].first, last = cur[i].last;
      uint32_t size = last - first;
      if (size > 1) {
        uint32_t mid = first + size / 2;
        if (size > options.inline_range) {
          double bt0 = now_seconds();
          batch_targets.clear();
          for (size_t t = i; t < j; ++t) batch_targets.push_back(cur[t].query);
          estimator.eval({first, mid}, batch_targets,
                         std::span<double>(g1.data() + i, j - i));
          estimator.eval({mid, last}, batch_targets,
                         std::span<double>(g2.data() + i, j - i));
          t_batch += now_seconds() - bt0;
        } else {
          inline_spans.emplace_back(i, j);
        }
      }
      i = j;
    }
    double it0 = now_seconds();
    if (!inline_spans.empty()) {
      // Flatten spans for an even parallel split.
      std::vector<size_t> idx;
      for (auto [lo, hi] : inline_spans)
        for (size_t t = lo; t < hi; ++t) idx.push_back(t);
      const bool budgeted = estimator.epsilon() > 0.0 &&
                            kernel.family() == KernelFamily::gaussian;
      const double inv_h2 = 1.0 / (kernel.sigma() * kernel.sigma());
      parallel_chunks(0, idx.size(), [&](size_t lo, size_t hi) {
        for (size_t ii = lo; ii < hi; ++ii) {
          const Entry& e = cur[idx[ii]];
          const double* y = ds.point(e.query);
          uint32_t mid = e.first + (e.last - e.first) / 2;
          if (budgeted) {
            g1[idx[ii]] =
                inline_range_sum_fast(ds, inv_h2, e.first, mid, y, floor);
            g2[idx[ii]] =
                inline_range_sum_fast(ds, inv_h2, mid, e.last, y, floor);
          } else {
            g1[idx[ii]] = inline_range_sum(ds, kernel, e.first, mid, y, floor);
            g2[idx[ii]] = inline_range_sum(ds, kernel, mid, e.last, y, floor);
          }
        }
      });
    }

    t_inline += now_seconds() - it0;
    double rt0 = now_seconds();
    // Pass 2: route tickets; children of one node stay grouped.
    next.clear();
    i = 0;
    while (i < cur.size()) {
      size_t j = i;
      while (j < cur.size() && cur[j].first == cur[i].first &&
             cur[j].last == cur[i].last)
        ++j;
      uint32_t first = cur[i].first, last = cur[i].last;
      uint32_t size = last - first;
      if (size == 1) {
        for (size_t t = i; t < j; ++t)
          out.push_back({cur[t].query, first, cur[t].tickets});
      } else {
        uint32_t mid = first + size / 2;
        left_buf.clear();
        right_buf.clear();
        for (size_t t = i; t < j; ++t) {
          const Entry& e = cur[t];
          double a = g1[t], b = g2[t];
          double p;
          if (a <= floor && b <= floor) {
            p = 0.5;
            if (diagnostics) diagnostics->degenerate_draws += e.tickets;
          } else {
            p = a / (a + b);
          }
          RngStream rng = RngStream::keyed(
              seed, kRouteTag, (uint64_t(first) << 32) | last, e.query);
          uint32_t to_left =
              static_cast<uint32_t>(rng.binomial(e.tickets, p));
          if (to_left > 0) left_buf.push_back({first, mid, e.query, to_left});
          if (to_left < e.tickets)
            right_buf.push_back({mid, last, e.query, e.tickets - to_left});
        }
        next.insert(next.end(), left_buf.begin(), left_buf.end());
        next.insert(next.end(), right_buf.begin(), right_buf.end());
      }
      i = j;
    }
    t_route += now_seconds() - rt0;
    if (trace) {
      uint64_t tickets = 0;
      for (const Entry& e : cur) tickets += e.tickets;
      std::fprintf(stderr, "level %u: entries=%zu tickets=%llu %.3fs\n",
                   level_no, cur.size(), (unsigned long long)tickets,
                   now_seconds() - level_t0);
      if (cur.empty() || next.empty())
        std::fprintf(stderr, "phases: batch=%.2fs inline=%.2fs route=%.2fs\n",
                     t_batch, t_inline, t_route);
    }
    ++level_no;
    cur.swap(next);
  }

  std::sort(out.begin(), out.end(),
            [](const CountedNeighborSample& a, const CountedNeighborSample& b) {
              return a.query != b.query ? a.query < b.query
                                        : a.source < b.source;
            });
  return out;
}

std::vector<NeighborSample> sample_neighbors(std::span<const uint32_t> queries,
                                             const KdeEstimator& estimator,
                                             uint64_t seed,
                                             SampleDiagnostics* diagnostics,
                                             const SamplerOptions& options) {
  auto counted = sample_neighbors_counted(queries, estimator, 1, seed,
                                          diagnostics, options);
  std::unordered_map<uint32_t, uint32_t> choice;
  choice.reserve(counted.size());
  for (const auto& c : counted) choice[c.query] = c.source;

  std::vector<NeighborSample> out;
  out.reserve(queries.size());
  for (uint32_t q : queries) out.push_back({q, choice.at(q)});
  std::sort(out.begin(), out.end(),
            [](const NeighborSample& a, const NeighborSample& b) {
              return a.query != b.query ? a.query < b.query
                                        : a.source < b.source;
            });
  return out;
}

}  // namespace fsg
