#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fsg/dataset.hpp"
#include "fsg/kernel.hpp"

namespace fsg {

// Contiguous source index range [first, last).
struct IndexRange {
  uint32_t first = 0;
  uint32_t last = 0;
  uint32_t size() const { return last - first; }
};

enum class KdeBackend { exact, fast, autoselect };
enum class LogBase { two, natural };

double log_n(double n, LogBase base);
// eps = 1 / (6 log(n)), the budget under which the sampled similarity graph
// keeps its guarantees. Base-2 by default.
double default_epsilon(uint32_t n, LogBase base = LogBase::two);

struct KdeConfig {
  KdeBackend backend = KdeBackend::autoselect;
  // 0 means "use the default budget" for the fast backend; the exact backend
  // always reports epsilon() == 0.
  double epsilon = 0.0;
  LogBase log_base = LogBase::two;

  // Fast-backend tuning. Correctness does not depend on these.
  uint32_t direct_node_threshold = 64;  // ranges this small are summed directly
  double cell_radius_factor = 0.75;     // cell radius target, in units of sigma
  uint32_t expansion_order_cap = 48;
  uint32_t min_expansion_cell = 0;      // 0 = auto from term count
  uint32_t auto_fast_min_n = 4096;      // autoselect picks fast above this
  uint32_t auto_fast_max_dim = 3;
  bool allow_direct_fallback = true;    // false: throw AccuracyUnreachable
  double sum_floor = 1e-300;
};

// Batch evaluator of g_{[a,b)}(y) = sum_{j in [a,b)} k(y, x_j) over
// contiguous source ranges of one dataset. Immutable after construction;
// concurrent queries are safe and results are order-preserving.
class KdeEstimator {
public:
  virtual ~KdeEstimator() = default;

  // Targets given as dataset indices.
  virtual void eval(IndexRange range, std::span<const uint32_t> targets,
                    std::span<double> out) const = 0;
  // Targets given as raw points (m rows of dim() coordinates).
  virtual void eval_points(IndexRange range, const double* points, uint32_t m,
                           std::span<double> out) const = 0;

  virtual double epsilon() const = 0;
  virtual size_t memory_bytes() const = 0;

  const Dataset& data() const { return ds_; }
  const Kernel& kernel() const { return kernel_; }
  double sum_floor() const { return floor_; }
  // True when a requested fast backend fell back to exact evaluation
  // (unsupported kernel family).
  bool unsupported_kernel_fallback() const { return fell_back_; }
  const char* backend_name() const { return backend_name_; }

  std::vector<double> eval_to_vector(IndexRange range,
                                     std::span<const uint32_t> targets) const;

protected:
  KdeEstimator(const Dataset& ds, const Kernel& k, const char* name,
               double floor, bool fell_back)
      : ds_(ds), kernel_(k), backend_name_(name), floor_(floor),
        fell_back_(fell_back) {}

  const Dataset& ds_;
  Kernel kernel_;
  const char* backend_name_;
  double floor_;
  bool fell_back_;
};

std::unique_ptr<KdeEstimator> make_estimator(const Dataset& ds,
                                             const Kernel& kernel,
                                             const KdeConfig& config = {});

// One-shot conveniences over the estimators above.
std::vector<double> exact_kde(const Dataset& ds, const Kernel& kernel,
                              IndexRange range,
                              std::span<const uint32_t> targets);
std::vector<double> fast_kde(const Dataset& ds, const Kernel& kernel,
                             IndexRange range,
                             std::span<const uint32_t> targets,
                             double epsilon);

}  // namespace fsg
