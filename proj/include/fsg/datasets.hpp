#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "fsg/dataset.hpp"
#include "fsg/image.hpp"
#include "fsg/labels.hpp"

namespace fsg {

struct LabeledDataset {
  Dataset data;
  ClusterLabels labels;
};

// Two interleaved half-circles with additive isotropic Gaussian noise.
// Geometry matches the scikit-learn generator: outer arc
// (cos t, sin t), t in [0, pi]; inner arc (1 - cos t, 1 - sin t - 1/2).
// Points are emitted in arc order, outer first; labels are balanced.
LabeledDataset make_moons(uint32_t n, double noise, uint64_t seed);

// Concentric circles with radius ratio `factor` in (0, 1); outer circle
// first (label 0), angles evenly spaced over [0, 2 pi).
LabeledDataset make_circles(uint32_t n, double noise, double factor,
                            uint64_t seed);

// Isotropic Gaussians around the given centers, n split as evenly as
// possible, then an optional 2x2 linear transform applied to all points
// (d == 2 only). Row-major transform {a, b, c, d} maps (x, y) to
// (a x + b y, c x + d y).
LabeledDataset make_blobs(uint32_t n,
                          const std::vector<std::vector<double>>& centers,
                          double stddev,
                          const std::array<double, 4>& transform,
                          uint64_t seed);
LabeledDataset make_blobs(uint32_t n,
                          const std::vector<std::vector<double>>& centers,
                          double stddev, uint64_t seed);

constexpr std::array<double, 4> kIdentityTransform = {1.0, 0.0, 0.0, 1.0};

// One point (r, g, b, x, y) per pixel. With scale on (default), color
// channels map to [0, 1] and pixel coordinates map to [0, 1] divided by the
// larger image side (aspect ratio preserved); otherwise raw 0-255 channel
// values and column/row indices.
Dataset image_to_points(const Image& img, bool scale = true);

// Renders each cluster with the mean color of its member pixels when the
// original image is given, and with a fixed palette otherwise.
Image labels_to_image(const ClusterLabels& labels, uint32_t width,
                      uint32_t height, const Image* original = nullptr);

}  // namespace fsg
