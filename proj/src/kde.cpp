#include "fsg/kde.hpp"

#include <algorithm>
#include <cmath>

#include "fsg/common.hpp"
#include "kde_internal.hpp"

namespace fsg {

double log_n(double n, LogBase base) {
  return base == LogBase::two ? std::log2(n) : std::log(n);
}

double default_epsilon(uint32_t n, LogBase base) {
  double l = log_n(std::max<uint32_t>(n, 2), base);
  return 1.0 / (6.0 * std::max(l, 1.0));
}

std::vector<double> KdeEstimator::eval_to_vector(
    IndexRange range, std::span<const uint32_t> targets) const {
  std::vector<double> out(targets.size());
  eval(range, targets, out);
  return out;
}

namespace {

void check_range(IndexRange r, uint32_t n) {
  if (r.first > r.last || r.last > n)
    throw InvalidConfig("invalid source index range [" +
                        std::to_string(r.first) + ", " +
                        std::to_string(r.last) + ") for n = " +
                        std::to_string(n));
}

// Kahan-compensated sum of k(y, x_j) over a contiguous source range.
double compensated_range_sum(const Dataset& ds, const Kernel& kernel,
                             IndexRange r, const double* y) {
  const uint32_t d = ds.dim();
  double sum = 0.0, comp = 0.0;
  for (uint32_t j = r.first; j < r.last; ++j) {
    double term = kernel(y, ds.point(j), d) - comp;
    double next = sum + term;
    comp = (next - sum) - term;
    sum = next;
  }
  return sum;
}

class ExactKdeEstimator final : public KdeEstimator {
public:
  ExactKdeEstimator(const Dataset& ds, const Kernel& kernel,
                    const KdeConfig& config, bool fell_back)
      : KdeEstimator(ds, kernel, "exact", config.sum_floor, fell_back) {}

  void eval(IndexRange range, std::span<const uint32_t> targets,
            std::span<double> out) const override {
    check_range(range, ds_.size());
    if (out.size() != targets.size())
      throw LengthMismatch("output span size mismatch");
    parallel_chunks(0, targets.size(), [&](size_t lo, size_t hi) {
      for (size_t t = lo; t < hi; ++t) {
        if (targets[t] >= ds_.size())
          throw InvalidConfig("target index out of range");
        double s = compensated_range_sum(ds_, kernel_, range,
                                         ds_.point(targets[t]));
        out[t] = range.size() == 0 ? 0.0 : std::max(s, floor_);
      }
    });
  }

  void eval_points(IndexRange range, const double* points, uint32_t m,
                   std::span<double> out) const override {
    check_range(range, ds_.size());
    if (out.size() != m) throw LengthMismatch("output span size mismatch");
    const uint32_t d = ds_.dim();
    parallel_chunks(0, m, [&](size_t lo, size_t hi) {
      for (size_t t = lo; t < hi; ++t) {
        double s = compensated_range_sum(ds_, kernel_, range,
                                         points + t * d);
        out[t] = range.size() == 0 ? 0.0 : std::max(s, floor_);
      }
    });
  }

  double epsilon() const override { return 0.0; }
  size_t memory_bytes() const override { return sizeof(*this); }
};

}  // namespace

namespace detail {

std::unique_ptr<KdeEstimator> make_exact_estimator(const Dataset& ds,
                                                   const Kernel& kernel,
                                                   const KdeConfig& config,
                                                   bool fell_back) {
  return std::make_unique<ExactKdeEstimator>(ds, kernel, config, fell_back);
}

}  // namespace detail

std::unique_ptr<KdeEstimator> make_estimator(const Dataset& ds,
                                             const Kernel& kernel,
                                             const KdeConfig& config) {
  KdeBackend backend = config.backend;
  if (backend == KdeBackend::autoselect) {
    bool fast_fits = kernel.family() == KernelFamily::gaussian &&
                     ds.dim() <= config.auto_fast_max_dim &&
                     ds.size() >= config.auto_fast_min_n;
    backend = fast_fits ? KdeBackend::fast : KdeBackend::exact;
  }

  if (backend == KdeBackend::exact)
    return detail::make_exact_estimator(ds, kernel, config, false);

  if (kernel.family() != KernelFamily::gaussian) {
    // UnsupportedKernel: informational fallback, reported through
    // unsupported_kernel_fallback().
    return detail::make_exact_estimator(ds, kernel, config, true);
  }

  double eps = config.epsilon > 0.0 ? config.epsilon
                                    : default_epsilon(ds.size(), config.log_base);
  if (!(eps > 0.0) || eps >= 1.0)
    throw InvalidConfig("fast KDE needs 0 < epsilon < 1");
  return detail::make_fast_gaussian_estimator(ds, kernel, config, eps);
}

std::vector<double> exact_kde(const Dataset& ds, const Kernel& kernel,
                              IndexRange range,
                              std::span<const uint32_t> targets) {
  KdeConfig cfg;
  cfg.backend = KdeBackend::exact;
  auto est = make_estimator(ds, kernel, cfg);
  return est->eval_to_vector(range, targets);
}

std::vector<double> fast_kde(const Dataset& ds, const Kernel& kernel,
                             IndexRange range,
                             std::span<const uint32_t> targets,
                             double epsilon) {
  KdeConfig cfg;
  cfg.backend = KdeBackend::fast;
  cfg.epsilon = epsilon;
  auto est = make_estimator(ds, kernel, cfg);
  return est->eval_to_vector(range, targets);
}

}  // namespace fsg
