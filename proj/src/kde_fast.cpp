#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "fsg/common.hpp"
#include "fsg/fastmath.hpp"
#include "fsg/kde.hpp"
#include "kde_internal.hpp"

// Fast Gaussian backend: sources are grouped by farthest-point clustering
// into cells of radius O(sigma); each sufficiently populated cell carries a
// truncated Taylor expansion of the kernel around its center, and queries
// combine per-cell expansions, direct sums, and skip bounds so that every
// answer is within (1 +- eps) of the true sum. One such structure exists for
// every node of the balanced binary partition of [0, n), which is exactly
// the family of ranges the neighbor sampler asks for.

namespace fsg::detail {

std::atomic<uint64_t> g_evals{0}, g_cells_scanned{0}, g_cells_retained{0},
    g_direct_members{0}, g_expansions{0}, g_expansion_terms{0},
    g_direct_smallcell{0}, g_direct_gate{0}, g_direct_order{0};

namespace {

// Multi-indices of total degree < max_order in graded order, so truncating
// an expansion to order p means using the prefix [0, nterms(p)).
// Each monomial extends its parent along one axis, giving O(1) evaluation
// per term.
struct MonomialTable {
  uint32_t dim = 0;
  uint32_t max_order = 0;
  std::vector<uint32_t> parent;
  std::vector<uint8_t> axis;
  std::vector<double> scale;           // 2^{|a|} / a!
  std::vector<uint32_t> order_terms;   // terms of degree < p: [0, order_terms[p])

  uint32_t nterms(uint32_t p) const { return order_terms[p]; }
};

MonomialTable build_monomial_table(uint32_t dim, uint32_t max_order) {
  MonomialTable t;
  t.dim = dim;
  t.max_order = max_order;
  t.parent = {0};
  t.axis = {0};
  t.scale = {1.0};
  t.order_terms.assign(max_order + 1, 0);
  t.order_terms[0] = 0;
  if (max_order >= 1) t.order_terms[1] = 1;

  struct Term {
    uint32_t index;
    uint32_t lead;  // extensions restricted to axes <= lead
    std::vector<uint32_t> alpha;
  };
  std::vector<Term> cur = {{0u, dim - 1, std::vector<uint32_t>(dim, 0)}};
  for (uint32_t deg = 1; deg < max_order; ++deg) {
    std::vector<Term> next;
    for (const Term& p : cur) {
      for (uint32_t a = 0; a <= p.lead; ++a) {
        Term child;
        child.alpha = p.alpha;
        child.alpha[a] += 1;
        child.lead = a;
        child.index = static_cast<uint32_t>(t.parent.size());
        t.parent.push_back(p.index);
        t.axis.push_back(static_cast<uint8_t>(a));
        t.scale.push_back(t.scale[p.index] * 2.0 / child.alpha[a]);
        next.push_back(std::move(child));
      }
    }
    cur = std::move(next);
    t.order_terms[deg + 1] = static_cast<uint32_t>(t.parent.size());
  }
  return t;
}

const MonomialTable& monomial_table(uint32_t dim, uint32_t max_order) {
  static std::mutex mutex;
  static std::map<std::pair<uint32_t, uint32_t>,
                  std::unique_ptr<MonomialTable>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_pair(dim, max_order);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, std::make_unique<MonomialTable>(
                                build_monomial_table(dim, max_order)))
             .first;
  }
  return *it->second;
}

uint32_t nterms_for(uint32_t dim, uint32_t p) {
  // C(p - 1 + dim, dim)
  uint64_t num = 1, den = 1;
  for (uint32_t i = 1; i <= dim; ++i) {
    num *= (p - 1 + i);
    den *= i;
  }
  return static_cast<uint32_t>(num / den);
}

struct TreeNode {
  uint32_t first;
  uint32_t last;
  int32_t left = -1;
  int32_t right = -1;
  int32_t sid = -1;
};

struct NodeCells {
  uint32_t first = 0;
  uint32_t last = 0;
  uint32_t ncells = 0;
  uint32_t p_store = 0;
  uint32_t nterms = 0;
  double ln_ncells = 0.0;
  double ln_size = 0.0;
  std::vector<double> centers;
  std::vector<double> radius;
  std::vector<double> ln_count;
  std::vector<double> lz_const;  // log(2 radius / h^2) per cell
  std::vector<uint32_t> count;
  std::vector<uint32_t> member_off;
  std::vector<uint32_t> members;
  std::vector<int64_t> coeff_off;  // -1: direct-only cell
  std::vector<float> coeffs;       // rounding stays far below any epsilon

  size_t bytes() const {
    return centers.capacity() * 8 + radius.capacity() * 8 +
           ln_count.capacity() * 8 + lz_const.capacity() * 8 +
           count.capacity() * 4 + member_off.capacity() * 4 +
           members.capacity() * 4 + coeff_off.capacity() * 8 +
           coeffs.capacity() * 4;
  }
};

double sqdist(const double* a, const double* b, uint32_t d) {
  double s = 0.0;
  for (uint32_t i = 0; i < d; ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

class FastGaussianEstimator final : public KdeEstimator {
public:
  FastGaussianEstimator(const Dataset& ds, const Kernel& kernel,
                        const KdeConfig& config, double epsilon)
      : KdeEstimator(ds, kernel, "fast-gauss", config.sum_floor, false),
        eps_(epsilon),
        ln_half_eps_(std::log(0.5 * epsilon)),
        h2_(kernel.sigma() * kernel.sigma()),
        inv_h2_(1.0 / (kernel.sigma() * kernel.sigma())),
        direct_threshold_(std::max<uint32_t>(config.direct_node_threshold, 1)),
        allow_direct_fallback_(config.allow_direct_fallback) {
    const double sigma = kernel.sigma();
    r_target_ = std::max(config.cell_radius_factor, 0.05) * sigma;

    order_cap_ = config.expansion_order_cap;
    uint32_t root_order = pick_stored_order(ds.size());
    table_ = &monomial_table(ds.dim(), root_order);
    min_expansion_cell_ =
        config.min_expansion_cell ? config.min_expansion_cell : 8;
    log_k_.resize(root_order + 2);
    for (uint32_t k = 1; k < log_k_.size(); ++k) log_k_[k] = std::log(double(k));
    lgamma_.resize(root_order + 2, 0.0);
    for (uint32_t k = 1; k < lgamma_.size(); ++k)
      lgamma_[k] = lgamma_[k - 1] + log_k_[k];  // lgamma_[p] = ln(p!)

    build_tree();
    build_structures();
  }

  void eval(IndexRange range, std::span<const uint32_t> targets,
            std::span<double> out) const override {
    if (range.first > range.last || range.last > ds_.size())
      throw InvalidConfig("invalid source index range");
    if (out.size() != targets.size())
      throw LengthMismatch("output span size mismatch");
    std::vector<uint32_t> pieces = cover(range);
    parallel_chunks(0, targets.size(), [&](size_t lo, size_t hi) {
      for (size_t t = lo; t < hi; ++t) {
        if (targets[t] >= ds_.size())
          throw InvalidConfig("target index out of range");
        out[t] = eval_pieces(pieces, ds_.point(targets[t]), range);
      }
    });
  }

  void eval_points(IndexRange range, const double* points, uint32_t m,
                   std::span<double> out) const override {
    if (range.first > range.last || range.last > ds_.size())
      throw InvalidConfig("invalid source index range");
    if (out.size() != m) throw LengthMismatch("output span size mismatch");
    std::vector<uint32_t> pieces = cover(range);
    const uint32_t d = ds_.dim();
    parallel_chunks(0, m, [&](size_t lo, size_t hi) {
      for (size_t t = lo; t < hi; ++t)
        out[t] = eval_pieces(pieces, points + t * d, range);
    });
  }

  double epsilon() const override { return eps_; }

  size_t memory_bytes() const override { return bytes_; }

private:
  // Smallest order that keeps the value-bearing cells expandable for a
  // node of `count` sources. The binding case is a query at distance d
  // from a cell when the node-local scale g_lb comes from that same cell's
  // center: tolerance shrinks by e^{-(2 r d - r^2)/h^2} while z = 2 r d/h^2
  // grows, so sweep d out to the mass horizon. Queries needing still more
  // order fall back to exact per-cell sums.
  uint32_t pick_stored_order(uint32_t count) const {
    uint32_t p = order_cap_;
    if (allow_direct_fallback_) {
      const double h = kernel_.sigma();
      const double base_tol =
          std::log(std::max(1e-18, 0.5 * eps_ / std::max(count, 2u)));
      uint32_t best = 4;
      for (double d = 0.25 * h; d <= 5.01 * h; d += 0.25 * h) {
        double z_ref = 2.0 * r_target_ * d * inv_h2_;
        // g_lb comes from the nearest center, a source point at distance d,
        // while the cell's truncation damp uses gap = d - r.
        double target =
            base_tol -
            (2.0 * r_target_ * d - r_target_ * r_target_) * inv_h2_;
        double lz = std::log(z_ref);
        double t_ln = 0.0;
        uint32_t need = 1;
        while (need < order_cap_ && t_ln + lz - std::log(double(need)) > target) {
          t_ln += lz - std::log(double(need));
          ++need;
        }
        best = std::max(best, need);
      }
      p = best;
    }
    // Keep the term count manageable in higher dimensions.
    while (p > 4 && nterms_for(ds_.dim(), p) > 6000) --p;
    return std::max<uint32_t>(p, 4);
  }

  void build_tree() {
    nodes_.reserve(2 * size_t(ds_.size()));
    nodes_.push_back({0, ds_.size()});
    for (size_t i = 0; i < nodes_.size(); ++i) {
      uint32_t first = nodes_[i].first, last = nodes_[i].last;
      if (last - first <= 1) continue;
      uint32_t mid = first + (last - first) / 2;
      nodes_[i].left = static_cast<int32_t>(nodes_.size());
      nodes_.push_back({first, mid});
      nodes_[i].right = static_cast<int32_t>(nodes_.size());
      nodes_.push_back({mid, last});
    }
  }

  void build_structures() {
    std::vector<uint32_t> wanted;
    for (uint32_t i = 0; i < nodes_.size(); ++i)
      if (nodes_[i].last - nodes_[i].first > direct_threshold_)
        wanted.push_back(i);
    // Large nodes first so one worker is not stuck with the root at the end.
    std::sort(wanted.begin(), wanted.end(), [&](uint32_t a, uint32_t b) {
      return (nodes_[a].last - nodes_[a].first) >
             (nodes_[b].last - nodes_[b].first);
    });
    structures_.resize(wanted.size());
    for (size_t s = 0; s < wanted.size(); ++s)
      nodes_[wanted[s]].sid = static_cast<int32_t>(s);
    parallel_for(0, wanted.size(), [&](size_t s) {
      build_cells(structures_[s], nodes_[wanted[s]].first,
                  nodes_[wanted[s]].last);
    });

    bytes_ = nodes_.capacity() * sizeof(TreeNode);
    for (const NodeCells& s : structures_) bytes_ += s.bytes();
  }

  void build_cells(NodeCells& s, uint32_t first, uint32_t last) const {
    const uint32_t nd = last - first;
    const uint32_t d = ds_.dim();
    s.first = first;
    s.last = last;

    // Farthest-point (Gonzalez) clustering until every point lies within
    // r_target of its center.
    std::vector<double> dist2(nd);
    std::vector<uint32_t> nearest(nd, 0);
    std::vector<uint32_t> center_pt = {first};
    const double* c0 = ds_.point(first);
    for (uint32_t i = 0; i < nd; ++i)
      dist2[i] = sqdist(ds_.point(first + i), c0, d);
    const double r2 = r_target_ * r_target_;
    for (;;) {
      uint32_t arg = 0;
      double best = dist2[0];
      for (uint32_t i = 1; i < nd; ++i)
        if (dist2[i] > best) {
          best = dist2[i];
          arg = i;
        }
      if (best <= r2 || center_pt.size() == nd) break;
      uint32_t cid = static_cast<uint32_t>(center_pt.size());
      center_pt.push_back(first + arg);
      const double* c = ds_.point(first + arg);
      for (uint32_t i = 0; i < nd; ++i) {
        double dd = sqdist(ds_.point(first + i), c, d);
        if (dd < dist2[i]) {
          dist2[i] = dd;
          nearest[i] = cid;
        }
      }
    }

    const uint32_t ncells = static_cast<uint32_t>(center_pt.size());
    s.ncells = ncells;
    s.centers.resize(size_t(ncells) * d);
    for (uint32_t c = 0; c < ncells; ++c)
      std::memcpy(&s.centers[size_t(c) * d], ds_.point(center_pt[c]),
                  d * sizeof(double));

    s.count.assign(ncells, 0);
    for (uint32_t i = 0; i < nd; ++i) s.count[nearest[i]]++;
    s.member_off.assign(ncells + 1, 0);
    for (uint32_t c = 0; c < ncells; ++c)
      s.member_off[c + 1] = s.member_off[c] + s.count[c];
    s.members.resize(nd);
    {
      std::vector<uint32_t> cursor(s.member_off.begin(), s.member_off.end() - 1);
      for (uint32_t i = 0; i < nd; ++i) s.members[cursor[nearest[i]]++] = first + i;
    }
    s.radius.assign(ncells, 0.0);
    for (uint32_t i = 0; i < nd; ++i)
      s.radius[nearest[i]] = std::max(s.radius[nearest[i]], dist2[i]);
    for (uint32_t c = 0; c < ncells; ++c) s.radius[c] = std::sqrt(s.radius[c]);
    s.ln_count.resize(ncells);
    for (uint32_t c = 0; c < ncells; ++c)
      s.ln_count[c] = std::log(double(s.count[c]));
    s.lz_const.resize(ncells);
    for (uint32_t c = 0; c < ncells; ++c)
      s.lz_const[c] = s.radius[c] > 0.0
                          ? std::log(2.0 * s.radius[c] * inv_h2_)
                          : -745.0;
    s.ln_ncells = std::log(double(ncells));
    s.ln_size = std::log(double(nd));

    // Taylor coefficients for populated cells; sparse cells stay direct.
    s.p_store = pick_stored_order(nd);
    s.nterms = table_->nterms(s.p_store);
    s.coeff_off.assign(ncells, -1);
    size_t n_exp = 0;
    for (uint32_t c = 0; c < ncells; ++c)
      if (s.count[c] >= min_expansion_cell_)
        s.coeff_off[c] = static_cast<int64_t>(n_exp++) * s.nterms;
    s.coeffs.assign(n_exp * s.nterms, 0.0);

    const double inv_h = 1.0 / kernel_.sigma();
    std::vector<double> mono(s.nterms);
    std::vector<double> acc(s.nterms);
    std::vector<double> u(d);
    for (uint32_t c = 0; c < ncells; ++c) {
      if (s.coeff_off[c] < 0) continue;
      std::fill(acc.begin(), acc.end(), 0.0);
      const double* center = &s.centers[size_t(c) * d];
      for (uint32_t mi = s.member_off[c]; mi < s.member_off[c + 1]; ++mi) {
        const double* x = ds_.point(s.members[mi]);
        double dx2 = 0.0;
        for (uint32_t a = 0; a < d; ++a) {
          double t = x[a] - center[a];
          dx2 += t * t;
          u[a] = t * inv_h;
        }
        double w = std::exp(-dx2 * inv_h2_);
        mono[0] = 1.0;
        acc[0] += w;
        for (uint32_t t = 1; t < s.nterms; ++t) {
          mono[t] = mono[table_->parent[t]] * u[table_->axis[t]];
          acc[t] += w * mono[t];
        }
      }
      float* coeff = s.coeffs.data() + s.coeff_off[c];
      for (uint32_t t = 0; t < s.nterms; ++t)
        coeff[t] = static_cast<float>(acc[t] * table_->scale[t]);
    }
  }

  // Canonical decomposition of [first, last) into tree nodes.
  std::vector<uint32_t> cover(IndexRange range) const {
    std::vector<uint32_t> out;
    if (range.size() == 0) return out;
    cover_rec(0, range.first, range.last, out);
    return out;
  }

  void cover_rec(uint32_t nid, uint32_t a, uint32_t b,
                 std::vector<uint32_t>& out) const {
    const TreeNode& node = nodes_[nid];
    if (a <= node.first && node.last <= b) {
      out.push_back(nid);
      return;
    }
    uint32_t mid = node.first + (node.last - node.first) / 2;
    if (a < mid) cover_rec(node.left, a, std::min(b, mid), out);
    if (b > mid) cover_rec(node.right, std::max(a, mid), b, out);
  }

  double eval_pieces(const std::vector<uint32_t>& pieces, const double* y,
                     IndexRange range) const {
    double total = 0.0;
    for (uint32_t nid : pieces) total += eval_node(nodes_[nid], y);
    return range.size() == 0 ? 0.0 : std::max(total, floor_);
  }

  double direct_sum(uint32_t first, uint32_t last, const double* y) const {
    const uint32_t d = ds_.dim();
    const uint32_t m = last - first;
    thread_local std::vector<double> d2_buf;
    d2_buf.resize(m);
    if (d == 2) {
      const double* x = ds_.point(first);
      const double y0 = y[0], y1 = y[1];
      for (uint32_t j = 0; j < m; ++j, x += 2) {
        double t0 = y0 - x[0], t1 = y1 - x[1];
        d2_buf[j] = (t0 * t0 + t1 * t1) * inv_h2_;
      }
    } else {
      for (uint32_t j = 0; j < m; ++j)
        d2_buf[j] = sqdist(y, ds_.point(first + j), d) * inv_h2_;
    }
    return fast_exp_neg_sum(d2_buf.data(), m);
  }

  double direct_members(const NodeCells& s, uint32_t c, const double* y) const {
    const uint32_t d = ds_.dim();
    const uint32_t m = s.member_off[c + 1] - s.member_off[c];
    const uint32_t* idx = s.members.data() + s.member_off[c];
    thread_local std::vector<double> d2_buf;
    d2_buf.resize(m);
    for (uint32_t j = 0; j < m; ++j)
      d2_buf[j] = sqdist(y, ds_.point(idx[j]), d) * inv_h2_;
    return fast_exp_neg_sum(d2_buf.data(), m);
  }

  double eval_node(const TreeNode& node, const double* y) const {
    if (node.sid < 0) {
      g_evals.fetch_add(1, std::memory_order_relaxed);
      g_direct_members.fetch_add(node.last - node.first,
                                 std::memory_order_relaxed);
      return direct_sum(node.first, node.last, y);
    }
    const NodeCells& s = structures_[node.sid];
    g_evals.fetch_add(1, std::memory_order_relaxed);
    g_cells_scanned.fetch_add(s.ncells, std::memory_order_relaxed);
    const uint32_t d = ds_.dim();
    const uint32_t ncells = s.ncells;

    thread_local std::vector<double> scratch_buf;
    scratch_buf.resize(2 * size_t(ncells));
    double* dy2 = scratch_buf.data();
    double* dys = scratch_buf.data() + ncells;
    uint32_t cbest = 0;
    double best = dy2[0] = sqdist(y, s.centers.data(), d);
    for (uint32_t c = 1; c < ncells; ++c) {
      dy2[c] = sqdist(y, &s.centers[size_t(c) * d], d);
      if (dy2[c] < best) {
        best = dy2[c];
        cbest = c;
      }
    }
    for (uint32_t c = 0; c < ncells; ++c) dys[c] = std::sqrt(dy2[c]);
    // Stage one: cell centers are themselves source points, so the nearest
    // center alone certifies g >= exp(-d^2 / h^2).
    double ln_g_lb = std::max(-dy2[cbest] * inv_h2_, -702.0);
    double ln_tol_cell = ln_half_eps_ + ln_g_lb - s.ln_ncells;

    // Stage two, for large nodes only: cells surviving the crude filter
    // certify a much larger mass (their centers plus worst-case positions
    // of the remaining members), which buys looser tolerances for everyone.
    thread_local std::vector<uint32_t> survivors_buf;
    survivors_buf.clear();
    const bool two_stage = (s.last - s.first) >= 512;
    if (two_stage) {
      double g_sum_lb = 0.0;
      for (uint32_t c = 0; c < ncells; ++c) {
        double thr = (s.ln_count[c] - ln_tol_cell) * h2_;
        if (thr <= 0.0) continue;
        double gap = dys[c] - s.radius[c];
        if (gap > 0.0 && gap * gap >= thr) continue;
        survivors_buf.push_back(c);
        double far = dys[c] + s.radius[c];
        g_sum_lb += fast_exp_neg(-dy2[c] * inv_h2_) +
                    double(s.count[c] - 1) * fast_exp_neg(-far * far * inv_h2_);
      }
      if (g_sum_lb > 0.0)
        ln_g_lb = std::max(ln_g_lb,
                           detail_fastmath::fast_log_upper(g_sum_lb) - 1e-6);
    } else {
      for (uint32_t c = 0; c < ncells; ++c) survivors_buf.push_back(c);
    }
    double ln_half_eps_glb = ln_half_eps_ + ln_g_lb;
    ln_tol_cell = ln_half_eps_glb - s.ln_ncells;
    double tau_ln = ln_half_eps_glb - s.ln_size;

    double acc = 0.0;
    for (uint32_t sc : survivors_buf) {
      uint32_t c = sc;
      double thr = (s.ln_count[c] - ln_tol_cell) * h2_;
      if (thr <= 0.0) continue;
      double dy = dys[c];
      double gap = dy - s.radius[c];
      if (gap > 0.0 && gap * gap >= thr) continue;

      g_cells_retained.fetch_add(1, std::memory_order_relaxed);
      if (s.coeff_off[c] < 0) {
        g_direct_members.fetch_add(s.count[c], std::memory_order_relaxed);
        g_direct_smallcell.fetch_add(s.count[c], std::memory_order_relaxed);
        acc += direct_members(s, c, y);
        continue;
      }
      // Truncation order from the remainder bound
      // z^p / p! * exp(-gap^2 / h^2) <= tau with z = 2 r_c d_y / h^2:
      // the bound rises until p ~ z and then falls, so check the constant
      // term, then binary-search the falling branch.
      double damp = gap > 0.0 ? -gap * gap * inv_h2_ : 0.0;
      uint32_t p = 1;
      if (dy2[c] > 0.0 && s.radius[c] > 0.0) {
        double lz = s.lz_const[c] +
                    0.5 * detail_fastmath::fast_log_upper(dy2[c]);
        if (damp + lz > tau_ln) {
          double zbar = 2.0 * s.radius[c] * dy * inv_h2_;
          uint32_t lo = std::max<uint32_t>(
              2, uint32_t(std::ceil(std::min(zbar, double(s.p_store)))));
          uint32_t hi = s.p_store;
          auto bound = [&](uint32_t q) {
            return damp + q * lz - lgamma_[q];
          };
          if (bound(hi) > tau_ln) {
            p = s.p_store + 1;  // out of stored range
          } else {
            if (bound(lo) > tau_ln) {
              while (hi - lo > 1) {  // falling branch
                uint32_t mid = (lo + hi) / 2;
                if (bound(mid) > tau_ln)
                  lo = mid;
                else
                  hi = mid;
              }
              p = hi;
            } else {
              p = lo;
            }
          }
        }
      }
      if (p > s.p_store) {
        if (!allow_direct_fallback_)
          throw AccuracyUnreachable(
              "expansion order beyond cap " + std::to_string(s.p_store) +
              " needed for requested epsilon");
        g_direct_members.fetch_add(s.count[c], std::memory_order_relaxed);
        g_direct_order.fetch_add(s.count[c], std::memory_order_relaxed);
        acc += direct_members(s, c, y);
        continue;
      }
      uint32_t nt = table_->nterms(p);
      // A direct member costs an exp() (tens of flops); a term costs two.
      if (nt >= 12 * s.count[c]) {
        g_direct_members.fetch_add(s.count[c], std::memory_order_relaxed);
        g_direct_gate.fetch_add(s.count[c], std::memory_order_relaxed);
        acc += direct_members(s, c, y);
        continue;
      }
      g_expansions.fetch_add(1, std::memory_order_relaxed);
      g_expansion_terms.fetch_add(nt, std::memory_order_relaxed);
      acc += eval_expansion(s, c, y, nt, dy2[c]);
    }
    return acc;
  }

  double eval_expansion(const NodeCells& s, uint32_t c, const double* y,
                        uint32_t nt, double dy2) const {
    const uint32_t d = ds_.dim();
    const double inv_h = 1.0 / kernel_.sigma();
    const double* center = &s.centers[size_t(c) * d];
    const float* coeff = s.coeffs.data() + s.coeff_off[c];
    double v[8];
    for (uint32_t a = 0; a < d; ++a) v[a] = (y[a] - center[a]) * inv_h;

    double dot;
    if (d == 1) {
      double m = 1.0;
      dot = coeff[0];
      for (uint32_t t = 1; t < nt; ++t) {
        m *= v[0];
        dot += coeff[t] * m;
      }
    } else if (d == 2) {
      // Degree-g block occupies [g(g+1)/2, ...) and holds
      // x^g, x^{g-1} y, ..., y^g; each row comes from the previous one by
      // one multiply per entry, stride-1 for both rows and coefficients.
      thread_local std::vector<double> row_buf;
      row_buf.resize(2 * size_t(s.p_store) + 2);
      double* prev = row_buf.data();
      double* next = row_buf.data() + s.p_store + 1;
      const double vx = v[0], vy = v[1];
      prev[0] = 1.0;
      dot = coeff[0];
      uint32_t start = 1;
      for (uint32_t g = 1; start < nt; ++g, start += g) {
        next[0] = prev[0] * vx;
        for (uint32_t i = 1; i <= g; ++i) next[i] = prev[i - 1] * vy;
        const float* blk = coeff + start;
        double acc = 0.0;
        for (uint32_t i = 0; i <= g; ++i) acc += blk[i] * next[i];
        dot += acc;
        std::swap(prev, next);
      }
    } else {
      thread_local std::vector<double> mono_buf;
      mono_buf.resize(s.nterms);
      double* mono = mono_buf.data();
      mono[0] = 1.0;
      dot = coeff[0];
      for (uint32_t t = 1; t < nt; ++t) {
        mono[t] = mono[table_->parent[t]] * v[table_->axis[t]];
        dot += coeff[t] * mono[t];
      }
    }
    return std::exp(-dy2 * inv_h2_) * dot;
  }

  double eps_;
  double ln_half_eps_;
  double h2_;
  double inv_h2_;
  double r_target_;
  uint32_t direct_threshold_;
  bool allow_direct_fallback_;
  uint32_t order_cap_ = 0;
  uint32_t min_expansion_cell_ = 0;
  const MonomialTable* table_ = nullptr;
  std::vector<double> log_k_;
  std::vector<double> lgamma_;
  std::vector<TreeNode> nodes_;
  std::vector<NodeCells> structures_;
  size_t bytes_ = 0;
};

}  // namespace

std::unique_ptr<KdeEstimator> make_fast_gaussian_estimator(
    const Dataset& ds, const Kernel& kernel, const KdeConfig& config,
    double epsilon) {
  if (ds.dim() > 8)
    return make_exact_estimator(ds, kernel, config, true);
  return std::make_unique<FastGaussianEstimator>(ds, kernel, config, epsilon);
}

}  // namespace fsg::detail
