#include "fsg/kernel.hpp"

#include "fsg/common.hpp"

namespace fsg {

std::string kernel_family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::gaussian: return "gaussian";
    case KernelFamily::exponential: return "exponential";
    case KernelFamily::laplacian: return "laplacian";
  }
  return "?";
}

KernelFamily kernel_family_from_name(const std::string& name) {
  if (name == "gaussian") return KernelFamily::gaussian;
  if (name == "exponential") return KernelFamily::exponential;
  if (name == "laplacian") return KernelFamily::laplacian;
  throw InvalidConfig("unknown kernel family: " + name);
}

Kernel::Kernel(KernelFamily family, double sigma)
    : family_(family), sigma_(sigma) {
  if (!(sigma > 0.0)) throw InvalidConfig("kernel bandwidth must be positive");
}

double kernel_eval(const Kernel& kernel, const double* x, const double* y,
                   uint32_t d) {
  return kernel(x, y, d);
}

std::vector<double> pairwise_kernel_matrix(const Dataset& ds,
                                           const Kernel& kernel,
                                           uint32_t cap) {
  uint32_t n = ds.size();
  if (n > cap)
    throw OracleCapExceeded("pairwise kernel matrix: n = " + std::to_string(n) +
                            " exceeds cap " + std::to_string(cap));
  std::vector<double> m(size_t(n) * n);
  parallel_for(0, n, [&](size_t i) {
    const double* xi = ds.point(static_cast<uint32_t>(i));
    m[i * n + i] = 1.0;
    for (uint32_t j = static_cast<uint32_t>(i) + 1; j < n; ++j) {
      double v = kernel(xi, ds.point(j), ds.dim());
      m[i * n + j] = v;
      m[size_t(j) * n + i] = v;
    }
  });
  return m;
}

}  // namespace fsg
