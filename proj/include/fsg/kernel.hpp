#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fsg/dataset.hpp"

namespace fsg {

enum class KernelFamily { gaussian, exponential, laplacian };

std::string kernel_family_name(KernelFamily f);
KernelFamily kernel_family_from_name(const std::string& name);

// Pairwise similarity k(x, y) in (0, 1], k(x, x) = 1.
//   gaussian:     exp(-||x-y||_2^2 / sigma^2)
//   exponential:  exp(-||x-y||_2 / sigma)
//   laplacian:    exp(-||x-y||_1 / sigma)
class Kernel {
public:
  Kernel(KernelFamily family, double sigma);

  KernelFamily family() const { return family_; }
  double sigma() const { return sigma_; }

  double operator()(const double* x, const double* y, uint32_t d) const {
    switch (family_) {
      case KernelFamily::gaussian: {
        double s = 0.0;
        for (uint32_t i = 0; i < d; ++i) {
          double t = x[i] - y[i];
          s += t * t;
        }
        return std::exp(-s / (sigma_ * sigma_));
      }
      case KernelFamily::exponential: {
        double s = 0.0;
        for (uint32_t i = 0; i < d; ++i) {
          double t = x[i] - y[i];
          s += t * t;
        }
        return std::exp(-std::sqrt(s) / sigma_);
      }
      case KernelFamily::laplacian: {
        double s = 0.0;
        for (uint32_t i = 0; i < d; ++i) s += std::fabs(x[i] - y[i]);
        return std::exp(-s / sigma_);
      }
    }
    return 0.0;
  }

private:
  KernelFamily family_;
  double sigma_;
};

double kernel_eval(const Kernel& kernel, const double* x, const double* y,
                   uint32_t d);

// Dense n x n kernel matrix (row-major), oracle support for small n.
// Throws OracleCapExceeded for n > cap.
std::vector<double> pairwise_kernel_matrix(const Dataset& ds,
                                           const Kernel& kernel,
                                           uint32_t cap = 10000);

}  // namespace fsg
