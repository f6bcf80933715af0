#pragma once

#include <memory>

#include "fsg/kde.hpp"

namespace fsg::detail {

std::unique_ptr<KdeEstimator> make_fast_gaussian_estimator(
    const Dataset& ds, const Kernel& kernel, const KdeConfig& config,
    double epsilon);

std::unique_ptr<KdeEstimator> make_exact_estimator(const Dataset& ds,
                                                   const Kernel& kernel,
                                                   const KdeConfig& config,
                                                   bool fell_back);

}  // namespace fsg::detail

#include <atomic>
namespace fsg::detail {
extern std::atomic<uint64_t> g_evals, g_cells_scanned, g_cells_retained,
    g_direct_members, g_expansions, g_expansion_terms, g_direct_smallcell,
    g_direct_gate, g_direct_order;
}
