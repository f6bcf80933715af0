#include "fsg/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <unordered_set>

#include <Eigen/Dense>

#include "fsg/common.hpp"
#include "fsg/rng.hpp"

namespace fsg {

namespace {

double dot(const double* a, const double* b, uint32_t n) {
  Eigen::Map<const Eigen::VectorXd> va(a, n), vb(b, n);
  return va.dot(vb);
}

void axpy(double alpha, const double* x, double* y, uint32_t n) {
  Eigen::Map<const Eigen::VectorXd> vx(x, n);
  Eigen::Map<Eigen::VectorXd> vy(y, n);
  vy += alpha * vx;
}

double norm2(const double* a, uint32_t n) {
  Eigen::Map<const Eigen::VectorXd> va(a, n);
  return va.norm();
}

void scale(double s, double* a, uint32_t n) {
  Eigen::Map<Eigen::VectorXd> va(a, n);
  va *= s;
}

}  // namespace

EigenResult smallest_eigenpairs(const WeightedGraph& g, uint32_t q,
                                const EigenOptions& opts) {
  const uint32_t n = g.num_vertices();
  if (q == 0 || q > n)
    throw InvalidConfig("requested eigenpair count must be in [1, n]");

  NormalizedLaplacian N(g);
  std::vector<uint32_t> comp = connected_components(g);
  uint32_t ncomp = 0;
  for (uint32_t c : comp) ncomp = std::max(ncomp, c + 1);

  EigenResult res;
  res.n = n;
  res.q = q;
  res.eigenvalues.assign(q, 0.0);
  res.eigenvectors.assign(size_t(n) * q, 0.0);
  res.residuals.assign(q, 0.0);

  // The zero eigenspace is known exactly: D^{1/2} indicator per component.
  const uint32_t nzero = std::min(q, ncomp);
  std::vector<double> kernel_basis(size_t(n) * ncomp, 0.0);
  {
    std::vector<double> comp_vol(ncomp, 0.0);
    for (uint32_t v = 0; v < n; ++v) comp_vol[comp[v]] += g.degree(v);
    for (uint32_t v = 0; v < n; ++v)
      kernel_basis[size_t(comp[v]) * n + v] =
          std::sqrt(g.degree(v) / comp_vol[comp[v]]);
  }
  for (uint32_t i = 0; i < nzero; ++i)
    std::memcpy(res.eigenvectors.data() + size_t(i) * n,
                kernel_basis.data() + size_t(i) * n, n * sizeof(double));

  const uint32_t need = q - nzero;
  if (need > 0) {
    const uint32_t free_dim = n - ncomp;
    if (need > free_dim)
      throw InvalidConfig("more eigenpairs requested than the graph has");

    const uint32_t m =
        opts.max_basis
            ? std::min(opts.max_basis, free_dim)
            : std::min(free_dim, std::max<uint32_t>(2 * need + 24, 40));
    const uint64_t budget =
        opts.max_matvecs ? opts.max_matvecs : uint64_t(50) * n + 1000;
    uint64_t matvecs = 0;

    std::vector<double> V(size_t(n) * (m + 1));
    std::vector<double> w(n);
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    RngStream rng = RngStream::keyed(opts.seed, 0x9d3f1c6a24b8e705ULL);

    auto project_out_kernel = [&](double* vec) {
      for (uint32_t c = 0; c < ncomp; ++c) {
        const double* u = kernel_basis.data() + size_t(c) * n;
        axpy(-dot(u, vec, n), u, vec, n);
      }
    };
    auto reorthogonalize = [&](double* vec, uint32_t upto) {
      for (int pass = 0; pass < 2; ++pass) {
        project_out_kernel(vec);
        for (uint32_t i = 0; i < upto; ++i) {
          const double* vi = V.data() + size_t(i) * n;
          axpy(-dot(vi, vec, n), vi, vec, n);
        }
      }
    };
    auto random_start = [&](double* vec, uint32_t upto) {
      for (int attempt = 0; attempt < 32; ++attempt) {
        for (uint32_t v = 0; v < n; ++v) vec[v] = rng.next_normal();
        reorthogonalize(vec, upto);
        double nn = norm2(vec, n);
        if (nn > 1e-10) {
          scale(1.0 / nn, vec, n);
          return;
        }
      }
      throw NoConvergence("cannot seed Lanczos start vector");
    };

    uint32_t locked = 0;  // Ritz columns kept across a thick restart
    double last_beta = 0.0;
    random_start(V.data(), 0);

    bool done = false;
    while (!done) {
      // Expand the basis to m columns with full reorthogonalization.
      // T holds the (arrow + tridiagonal) projection; couplings of the
      // locked block to the restart vector were installed at restart time.
      for (uint32_t j = locked; j < m; ++j) {
        const double* vj = V.data() + size_t(j) * n;
        N.apply(vj, w.data());
        ++matvecs;
        project_out_kernel(w.data());
        T(j, j) = dot(vj, w.data(), n);
        for (int pass = 0; pass < 2; ++pass) {
          for (uint32_t i = 0; i <= j; ++i) {
            const double* vi = V.data() + size_t(i) * n;
            axpy(-dot(vi, w.data(), n), vi, w.data(), n);
          }
          project_out_kernel(w.data());
        }
        double beta = norm2(w.data(), n);
        double* vnext = V.data() + size_t(j + 1) * n;
        if (j + 1 < m) {
          if (beta > 1e-13) {
            std::memcpy(vnext, w.data(), n * sizeof(double));
            scale(1.0 / beta, vnext, n);
          } else {
            // Invariant subspace reached; continue in a fresh direction.
            beta = 0.0;
            random_start(vnext, j + 1);
          }
          T(j, j + 1) = beta;
          T(j + 1, j) = beta;
        } else {
          last_beta = beta;
          if (beta > 1e-13) {
            std::memcpy(vnext, w.data(), n * sizeof(double));
            scale(1.0 / beta, vnext, n);
          } else {
            last_beta = 0.0;
            std::memset(vnext, 0, n * sizeof(double));
          }
        }
      }

      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      const Eigen::VectorXd& theta = es.eigenvalues();
      const Eigen::MatrixXd& S = es.eigenvectors();

      uint32_t converged = 0;
      for (uint32_t i = 0; i < need; ++i)
        if (std::abs(last_beta * S(m - 1, i)) <= opts.tol) ++converged;

      if (converged >= need) {
        done = true;
        Eigen::Map<const Eigen::MatrixXd> Vm(V.data(), n, m);
        Eigen::MatrixXd Y = Vm * S.leftCols(need);
        for (uint32_t i = 0; i < need; ++i) {
          res.eigenvalues[nzero + i] = theta[i];
          std::memcpy(res.eigenvectors.data() + size_t(nzero + i) * n,
                      Y.col(i).data(), n * sizeof(double));
        }
      } else if (matvecs >= budget) {
        throw NoConvergence("Lanczos: " + std::to_string(converged) + "/" +
                            std::to_string(need) + " pairs converged after " +
                            std::to_string(matvecs) + " matvecs (tol " +
                            std::to_string(opts.tol) + ")");
      } else {
        // Thick restart: keep the lowest Ritz pairs plus the residual
        // direction and resume the recurrence behind them.
        uint32_t keep = std::min<uint32_t>(need + 8, m - 2);
        Eigen::Map<const Eigen::MatrixXd> Vm(V.data(), n, m);
        Eigen::MatrixXd Y = Vm * S.leftCols(keep);
        std::vector<double> resid(V.data() + size_t(m) * n,
                                  V.data() + size_t(m) * n + n);
        for (uint32_t i = 0; i < keep; ++i)
          std::memcpy(V.data() + size_t(i) * n, Y.col(i).data(),
                      n * sizeof(double));
        double* vres = V.data() + size_t(keep) * n;
        std::memcpy(vres, resid.data(), n * sizeof(double));
        if (norm2(vres, n) < 0.5) random_start(vres, keep);
        T.setZero();
        for (uint32_t i = 0; i < keep; ++i) {
          T(i, i) = theta[i];
          double s = last_beta * S(m - 1, i);
          T(i, keep) = s;
          T(keep, i) = s;
        }
        locked = keep;
      }
    }
    res.matvecs = matvecs;
  }

  // True residuals for every returned pair.
  {
    std::vector<double> w(n);
    for (uint32_t i = 0; i < q; ++i) {
      const double* v = res.vector(i);
      N.apply(v, w.data());
      axpy(-res.eigenvalues[i], v, w.data(), n);
      res.residuals[i] = norm2(w.data(), n);
    }
  }
  return res;
}

std::vector<double> spectral_embed(const EigenResult& eigen, uint32_t k) {
  if (k == 0 || k > eigen.q)
    throw InvalidConfig("embedding needs 1 <= k <= computed pairs");
  const uint32_t n = eigen.n;
  std::vector<double> rows(size_t(n) * k);
  for (uint32_t v = 0; v < n; ++v) {
    double norm = 0.0;
    for (uint32_t c = 0; c < k; ++c) {
      double x = eigen.vector(c)[v];
      rows[size_t(v) * k + c] = x;
      norm += x * x;
    }
    if (norm > 0.0) {
      double inv = 1.0 / std::sqrt(norm);
      for (uint32_t c = 0; c < k; ++c) rows[size_t(v) * k + c] *= inv;
    }
  }
  return rows;
}

namespace {

double row_dist2(const double* a, const double* b, uint32_t d) {
  double s = 0.0;
  for (uint32_t i = 0; i < d; ++i) {
    double t = a[i] - b[i];
    s += t * t;
  }
  return s;
}

}  // namespace

KMeansResult kmeans(const std::vector<double>& points, uint32_t n,
                    uint32_t dim, uint32_t k, const KMeansOptions& opts,
                    std::vector<double>* cost_trace) {
  if (n == 0 || dim == 0) throw InvalidConfig("empty k-means input");
  if (points.size() != size_t(n) * dim)
    throw LengthMismatch("k-means input size mismatch");
  if (k == 0 || k > n) throw InvalidConfig("k must be in [1, n]");

  {
    std::unordered_set<std::string> distinct;
    for (uint32_t i = 0; i < n && distinct.size() < k; ++i)
      distinct.emplace(
          reinterpret_cast<const char*>(points.data() + size_t(i) * dim),
          dim * sizeof(double));
    if (distinct.size() < k)
      throw DegenerateInput("fewer than k distinct rows in k-means input");
  }

  KMeansResult best;
  best.cost = -1.0;
  std::vector<double> best_trace;

  std::vector<double> centers(size_t(k) * dim);
  std::vector<double> d2(n);
  std::vector<uint32_t> labels(n);
  std::vector<double> trace;

  for (uint32_t restart = 0; restart < std::max<uint32_t>(opts.restarts, 1);
       ++restart) {
    RngStream rng = RngStream::keyed(opts.seed, 0x6b6d65616e732b2bULL, restart);
    trace.clear();

    // k-means++ seeding.
    uint32_t c0 = static_cast<uint32_t>(rng.next_below(n));
    std::memcpy(centers.data(), points.data() + size_t(c0) * dim,
                dim * sizeof(double));
    for (uint32_t i = 0; i < n; ++i)
      d2[i] = row_dist2(points.data() + size_t(i) * dim, centers.data(), dim);
    for (uint32_t c = 1; c < k; ++c) {
      double total = 0.0;
      for (uint32_t i = 0; i < n; ++i) total += d2[i];
      double r = rng.next_double() * total;
      uint32_t pick = UINT32_MAX;
      double run = 0.0;
      for (uint32_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        run += d2[i];
        if (run >= r) {
          pick = i;
          break;
        }
      }
      if (pick == UINT32_MAX) {  // numerical tail: take the farthest point
        double fard = -1.0;
        for (uint32_t i = 0; i < n; ++i)
          if (d2[i] > fard) {
            fard = d2[i];
            pick = i;
          }
      }
      std::memcpy(centers.data() + size_t(c) * dim,
                  points.data() + size_t(pick) * dim, dim * sizeof(double));
      for (uint32_t i = 0; i < n; ++i) {
        double dd = row_dist2(points.data() + size_t(i) * dim,
                              centers.data() + size_t(c) * dim, dim);
        d2[i] = std::min(d2[i], dd);
      }
    }

    double prev_cost = -1.0;
    double cost = 0.0;
    uint32_t iters = 0;
    for (uint32_t iter = 0; iter < std::max<uint32_t>(opts.max_iters, 1);
         ++iter) {
      ++iters;
      parallel_chunks(0, n, [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) {
          const double* p = points.data() + i * dim;
          uint32_t bestc = 0;
          double bestd = row_dist2(p, centers.data(), dim);
          for (uint32_t c = 1; c < k; ++c) {
            double dd = row_dist2(p, centers.data() + size_t(c) * dim, dim);
            if (dd < bestd) {
              bestd = dd;
              bestc = c;
            }
          }
          labels[i] = bestc;
          d2[i] = bestd;
        }
      });

      std::vector<uint32_t> counts(k, 0);
      for (uint32_t i = 0; i < n; ++i) counts[labels[i]]++;
      bool repaired = false;
      for (uint32_t c = 0; c < k; ++c) {
        if (counts[c] > 0) continue;
        uint32_t far = UINT32_MAX;
        double fard = -1.0;
        for (uint32_t i = 0; i < n; ++i)
          if (counts[labels[i]] > 1 && d2[i] > fard) {
            fard = d2[i];
            far = i;
          }
        if (far == UINT32_MAX) continue;
        counts[labels[far]]--;
        labels[far] = c;
        counts[c] = 1;
        d2[far] = 0.0;
        std::memcpy(centers.data() + size_t(c) * dim,
                    points.data() + size_t(far) * dim, dim * sizeof(double));
        repaired = true;
      }

      std::vector<double> sums(size_t(k) * dim, 0.0);
      cost = 0.0;
      for (uint32_t i = 0; i < n; ++i) {
        const double* p = points.data() + size_t(i) * dim;
        double* s = sums.data() + size_t(labels[i]) * dim;
        for (uint32_t a = 0; a < dim; ++a) s[a] += p[a];
        cost += d2[i];
      }
      for (uint32_t c = 0; c < k; ++c) {
        if (counts[c] == 0) continue;
        for (uint32_t a = 0; a < dim; ++a)
          centers[size_t(c) * dim + a] = sums[size_t(c) * dim + a] / counts[c];
      }

      trace.push_back(cost);
      if (!repaired && prev_cost >= 0.0 &&
          prev_cost - cost <= opts.rel_tol * std::max(prev_cost, 1e-300))
        break;
      prev_cost = cost;
    }

    if (best.cost < 0.0 || cost < best.cost) {
      best.cost = cost;
      best.iterations = iters;
      best.labels.labels = labels;
      best.labels.k = k;
      best_trace = trace;
    }
  }

  if (cost_trace) *cost_trace = best_trace;
  return best;
}

ClusterLabels spectral_cluster(const WeightedGraph& g, uint32_t k,
                               uint64_t seed, const SpectralOptions& opts) {
  if (k < 2) throw InvalidConfig("spectral clustering needs k >= 2");
  EigenOptions eopts = opts.eigen;
  eopts.seed = splitmix64(seed ^ 0x73706563747261ULL);
  EigenResult eig = smallest_eigenpairs(g, k, eopts);
  std::vector<double> embed = spectral_embed(eig, k);
  KMeansOptions kopts = opts.kmeans;
  kopts.seed = seed;
  return kmeans(embed, g.num_vertices(), k, k, kopts).labels;
}

EigenGapScan eigen_gap_scan(const WeightedGraph& g, uint32_t q_max,
                            const EigenOptions& opts) {
  EigenResult eig = smallest_eigenpairs(g, q_max, opts);
  EigenGapScan scan;
  scan.eigenvalues = eig.eigenvalues;
  for (uint32_t i = 0; i + 1 < q_max; ++i)
    scan.ratios.push_back(eig.eigenvalues[i + 1] /
                          std::max(eig.eigenvalues[i], 1e-300));
  return scan;
}

}  // namespace fsg
