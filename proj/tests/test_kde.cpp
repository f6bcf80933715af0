#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fsg/common.hpp"
#include "fsg/kde.hpp"
#include "fsg/rng.hpp"
#include "support.hpp"

using namespace fsg;

TEST_SUITE_BEGIN("kde");

namespace {

std::vector<uint32_t> all_indices(uint32_t n) {
  std::vector<uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0u);
  return idx;
}

}  // namespace

TEST_CASE("exact kde hand examples") {
  // Single source equal to the single target.
  Dataset self({0.4, 0.6}, 1, 2);
  Kernel k(KernelFamily::gaussian, 1.0);
  auto g = exact_kde(self, k, {0, 1}, std::vector<uint32_t>{0});
  CHECK(g[0] == 1.0);

  // Sources at 0 and 1 on a line, target 0: 1 + e^{-1}.
  Dataset line({0.0, 1.0}, 2, 1);
  auto g2 = exact_kde(line, k, {0, 2}, std::vector<uint32_t>{0});
  CHECK(g2[0] == doctest::Approx(1.0 + std::exp(-1.0)).epsilon(1e-15));
  CHECK(g2[0] == doctest::Approx(1.3678794411714423).epsilon(1e-15));
}

TEST_CASE("exact kde equals brute force within 1e-10") {
  for (uint64_t seed : {1ull, 2ull, 3ull}) {
    uint32_t n = 400 + 300 * uint32_t(seed);
    auto ds = testsupport::random_dataset(n, 2, seed);
    Kernel k(KernelFamily::gaussian, 0.2);
    auto targets = all_indices(std::min(n, 150u));
    auto mine = exact_kde(ds, k, {0, n}, targets);
    auto brute = testsupport::brute_force_kde(ds, k, 0, n, targets);
    for (size_t i = 0; i < targets.size(); ++i)
      CHECK(std::fabs(mine[i] - brute[i]) <= 1e-10 * brute[i]);
  }
}

TEST_CASE("range additivity across arbitrary splits") {
  auto ds = testsupport::random_dataset(257, 3, 5);
  Kernel k(KernelFamily::exponential, 0.4);
  auto targets = all_indices(40);
  auto whole = exact_kde(ds, k, {0, 257}, targets);
  for (uint32_t cut : {1u, 2u, 100u, 128u, 200u, 256u}) {
    auto lo = exact_kde(ds, k, {0, cut}, targets);
    auto hi = exact_kde(ds, k, {cut, 257}, targets);
    for (size_t i = 0; i < targets.size(); ++i)
      CHECK(lo[i] + hi[i] == doctest::Approx(whole[i]).epsilon(1e-9));
  }
}

TEST_CASE("positivity on non-empty ranges") {
  auto ds = testsupport::random_dataset(64, 2, 9, 0.0, 100.0);
  Kernel k(KernelFamily::gaussian, 0.01);  // far-apart points underflow
  auto g = exact_kde(ds, k, {1, 33}, std::vector<uint32_t>{0});
  CHECK(g[0] > 0.0);
}

TEST_CASE("fast kde: point mass is exact") {
  // n identical sources, coincident target: expansion is exact.
  uint32_t n = 500;
  std::vector<double> pts(size_t(n) * 2, 0.25);
  Dataset ds(std::move(pts), n, 2);
  Kernel k(KernelFamily::gaussian, 0.3);
  KdeConfig cfg;
  cfg.backend = KdeBackend::fast;
  cfg.epsilon = 0.05;
  cfg.direct_node_threshold = 16;
  cfg.min_expansion_cell = 8;
  auto est = make_estimator(ds, k, cfg);
  std::vector<double> out(1);
  est->eval({0, n}, std::vector<uint32_t>{0}, out);
  CHECK(out[0] == doctest::Approx(double(n)).epsilon(1e-12));
}

TEST_CASE("fast kde meets its multiplicative budget on random configs") {
  RngStream rng = RngStream::keyed(2024, 0xacc);
  for (int trial = 0; trial < 12; ++trial) {
    uint32_t n = 300 + uint32_t(rng.next_below(1500));
    uint32_t d = 1 + uint32_t(rng.next_below(3));
    double sigma = 0.05 + 0.95 * rng.next_double();
    double eps = 0.02 + 0.2 * rng.next_double();
    auto ds = testsupport::random_dataset(n, d, 1000 + trial);
    Kernel k(KernelFamily::gaussian, sigma);

    KdeConfig cfg;
    cfg.backend = KdeBackend::fast;
    cfg.epsilon = eps;
    cfg.direct_node_threshold = 32;  // exercise the expansion path
    cfg.min_expansion_cell = 16;
    auto est = make_estimator(ds, k, cfg);

    auto targets = all_indices(std::min(n, 64u));
    std::vector<double> fast(targets.size());
    est->eval({0, n}, targets, fast);
    auto exact = exact_kde(ds, k, {0, n}, targets);
    for (size_t i = 0; i < targets.size(); ++i) {
      double rel = std::fabs(fast[i] / exact[i] - 1.0);
      CHECK(rel <= eps);
    }

    // Sub-ranges (including non-node-aligned ones) obey the same budget.
    uint32_t a = uint32_t(rng.next_below(n / 2));
    uint32_t b = a + 1 + uint32_t(rng.next_below(n - a - 1));
    std::vector<double> fr(targets.size());
    est->eval({a, b}, targets, fr);
    auto er = exact_kde(ds, k, {a, b}, targets);
    for (size_t i = 0; i < targets.size(); ++i)
      CHECK(std::fabs(fr[i] / er[i] - 1.0) <= eps);
  }
}

TEST_CASE("fast kde answers raw-point targets") {
  auto ds = testsupport::random_dataset(800, 2, 31);
  Kernel k(KernelFamily::gaussian, 0.2);
  KdeConfig cfg;
  cfg.backend = KdeBackend::fast;
  cfg.epsilon = 0.05;
  auto est = make_estimator(ds, k, cfg);

  std::vector<double> queries = {0.5, 0.5, 0.1, 0.9, 2.0, 2.0};
  std::vector<double> out(3);
  est->eval_points({0, 800}, queries.data(), 3, out);

  auto exact_est = make_estimator(ds, k, KdeConfig{.backend = KdeBackend::exact});
  std::vector<double> ref(3);
  exact_est->eval_points({0, 800}, queries.data(), 3, ref);
  for (int i = 0; i < 3; ++i)
    CHECK(std::fabs(out[i] / ref[i] - 1.0) <= 0.05);
}

TEST_CASE("default epsilon follows the budget 1/(6 log n)") {
  CHECK(default_epsilon(1024) == doctest::Approx(1.0 / 60.0).epsilon(1e-12));
  CHECK(default_epsilon(2) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(default_epsilon(100000, LogBase::natural) ==
        doctest::Approx(1.0 / (6.0 * std::log(100000.0))).epsilon(1e-12));
}

TEST_CASE("make_estimator backend selection rules") {
  Kernel gauss(KernelFamily::gaussian, 0.5);
  Kernel lap(KernelFamily::laplacian, 0.5);

  auto small = testsupport::random_dataset(64, 2, 1);
  KdeConfig cfg;
  cfg.backend = KdeBackend::exact;
  cfg.epsilon = 0.25;  // ignored by the exact backend
  auto e1 = make_estimator(small, gauss, cfg);
  CHECK(e1->epsilon() == 0.0);
  CHECK(std::string(e1->backend_name()) == "exact");

  // auto picks fast for Gaussian, low d, large n.
  auto big = testsupport::random_dataset(5000, 2, 2);
  KdeConfig autocfg;
  autocfg.auto_fast_min_n = 4096;
  auto e2 = make_estimator(big, gauss, autocfg);
  CHECK(std::string(e2->backend_name()) == "fast-gauss");
  CHECK(e2->epsilon() == doctest::Approx(default_epsilon(5000)));

  auto e3 = make_estimator(small, gauss, autocfg);
  CHECK(std::string(e3->backend_name()) == "exact");

  // fast + non-Gaussian falls back with the informational flag.
  KdeConfig fastcfg;
  fastcfg.backend = KdeBackend::fast;
  fastcfg.epsilon = 0.1;
  auto e4 = make_estimator(small, lap, fastcfg);
  CHECK(std::string(e4->backend_name()) == "exact");
  CHECK(e4->unsupported_kernel_fallback());
  CHECK(!e1->unsupported_kernel_fallback());

  // invalid epsilon
  KdeConfig bad;
  bad.backend = KdeBackend::fast;
  bad.epsilon = 1.5;
  CHECK_THROWS_AS(make_estimator(big, gauss, bad), InvalidConfig);
}

TEST_CASE("strict mode raises AccuracyUnreachable instead of direct fallback") {
  auto ds = testsupport::random_dataset(3000, 2, 77);
  Kernel k(KernelFamily::gaussian, 0.1);
  KdeConfig cfg;
  cfg.backend = KdeBackend::fast;
  cfg.epsilon = 1e-4;
  cfg.allow_direct_fallback = false;
  cfg.expansion_order_cap = 6;  // far too low for this epsilon
  cfg.direct_node_threshold = 32;
  cfg.min_expansion_cell = 8;
  auto est = make_estimator(ds, k, cfg);
  std::vector<double> out(8);
  CHECK_THROWS_AS(est->eval({0, 3000}, all_indices(8), out),
                  AccuracyUnreachable);
}

TEST_CASE("estimators reject malformed ranges and targets") {
  auto ds = testsupport::random_dataset(50, 2, 3);
  Kernel k(KernelFamily::gaussian, 0.5);
  auto est = make_estimator(ds, k, KdeConfig{.backend = KdeBackend::exact});
  std::vector<double> out(1);
  CHECK_THROWS_AS(est->eval({40, 20}, std::vector<uint32_t>{0}, out),
                  InvalidConfig);
  CHECK_THROWS_AS(est->eval({0, 51}, std::vector<uint32_t>{0}, out),
                  InvalidConfig);
  CHECK_THROWS_AS(est->eval({0, 50}, std::vector<uint32_t>{50}, out),
                  InvalidConfig);
}

TEST_SUITE_END();
