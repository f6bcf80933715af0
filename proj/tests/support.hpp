#pragma once

// Shared test oracles. Everything here is an independent reference path:
// brute-force loops, dense solvers, textbook statistics. Nothing reuses the
// library's fast implementations.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "fsg/dataset.hpp"
#include "fsg/graph.hpp"
#include "fsg/kernel.hpp"
#include "fsg/rng.hpp"

namespace testsupport {

inline fsg::Dataset random_dataset(uint32_t n, uint32_t d, uint64_t seed,
                                   double lo = 0.0, double hi = 1.0) {
  fsg::RngStream rng = fsg::RngStream::keyed(seed, 0x7465737464617461ULL);
  std::vector<double> pts(size_t(n) * d);
  for (auto& v : pts) v = lo + (hi - lo) * rng.next_double();
  return fsg::Dataset(std::move(pts), n, d);
}

// Plain double-loop KDE, no compensation, no floors.
inline std::vector<double> brute_force_kde(const fsg::Dataset& ds,
                                           const fsg::Kernel& kernel,
                                           uint32_t first, uint32_t last,
                                           const std::vector<uint32_t>& targets) {
  std::vector<double> out;
  out.reserve(targets.size());
  for (uint32_t t : targets) {
    double s = 0.0;
    for (uint32_t j = first; j < last; ++j)
      s += kernel(ds.point(t), ds.point(j), ds.dim());
    out.push_back(s);
  }
  return out;
}

inline Eigen::MatrixXd dense_normalized_laplacian(const fsg::WeightedGraph& g) {
  const uint32_t n = g.num_vertices();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const fsg::Edge& e : g.edges()) {
    a(e.u, e.v) += e.w;
    a(e.v, e.u) += e.w;
  }
  Eigen::VectorXd dinv(n);
  for (uint32_t v = 0; v < n; ++v) dinv(v) = 1.0 / std::sqrt(g.degree(v));
  Eigen::MatrixXd nmat = Eigen::MatrixXd::Identity(n, n) -
                         dinv.asDiagonal() * a * dinv.asDiagonal();
  return nmat;
}

// Ascending eigenvalues of the dense normalized Laplacian.
inline std::vector<double> dense_spectrum(const fsg::WeightedGraph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      dense_normalized_laplacian(g));
  return std::vector<double>(es.eigenvalues().data(),
                             es.eigenvalues().data() + g.num_vertices());
}

// O(n^2) pair-agreement count for the Rand index.
inline std::pair<uint64_t, uint64_t> pair_agreements(
    const std::vector<uint32_t>& a, const std::vector<uint32_t>& b) {
  uint64_t agree = 0, total = 0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j) {
      ++total;
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    }
  return {agree, total};
}

inline double brute_force_rand_index(const std::vector<uint32_t>& a,
                                     const std::vector<uint32_t>& b) {
  auto [agree, total] = pair_agreements(a, b);
  return double(agree) / double(total);
}

inline double brute_force_ari(const std::vector<uint32_t>& a,
                              const std::vector<uint32_t>& b) {
  // Pair-counting form: (RI - E[RI]) / (1 - E[RI]) written via the four
  // pair categories.
  double n11 = 0, n00 = 0, n10 = 0, n01 = 0;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = i + 1; j < a.size(); ++j) {
      bool sa = a[i] == a[j], sb = b[i] == b[j];
      if (sa && sb) ++n11;
      else if (!sa && !sb) ++n00;
      else if (sa) ++n10;
      else ++n01;
    }
  double total = n11 + n00 + n10 + n01;
  double sum_a = n11 + n10, sum_b = n11 + n01;
  double expected = sum_a * sum_b / total;
  double denom = 0.5 * (sum_a + sum_b) - expected;
  if (denom == 0.0) return 1.0;
  return (n11 - expected) / denom;
}

// Regularized lower incomplete gamma P(a, x), series + continued fraction.
inline double gamma_p(double a, double x) {
  if (x <= 0.0) return 0.0;
  double gln = std::lgamma(a);
  if (x < a + 1.0) {
    double ap = a, sum = 1.0 / a, del = sum;
    for (int i = 0; i < 500; ++i) {
      ap += 1.0;
      del *= x / ap;
      sum += del;
      if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - gln);
  }
  double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -double(i) * (double(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < 1e-300) d = 1e-300;
    c = b + an / c;
    if (std::fabs(c) < 1e-300) c = 1e-300;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 1e-15) break;
  }
  return 1.0 - std::exp(-x + a * std::log(x) - gln) * h;
}

// Upper quantile of the chi-squared distribution: smallest x with
// P(X <= x) >= 1 - alpha.
inline double chi_squared_quantile(uint32_t df, double alpha) {
  double lo = 0.0, hi = df + 200.0 * std::sqrt(double(df)) + 200.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (gamma_p(df / 2.0, mid / 2.0) < 1.0 - alpha)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline double total_variation(const std::vector<double>& p,
                              const std::vector<double>& q) {
  double s = 0.0;
  for (size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
  return 0.5 * s;
}

}  // namespace testsupport
