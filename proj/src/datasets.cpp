#include "fsg/datasets.hpp"

#include <algorithm>
#include <cmath>

#include "fsg/common.hpp"
#include "fsg/rng.hpp"

namespace fsg {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr uint64_t kMoonsTag = 0x6d6f6f6e73ULL;
constexpr uint64_t kCirclesTag = 0x636972636c6573ULL;
constexpr uint64_t kBlobsTag = 0x626c6f6273ULL;

// Per-point noise substream, so generation parallelizes by chunk without
// changing the output.
void add_noise(std::vector<double>& pts, uint32_t d, double stddev,
               uint64_t seed, uint64_t tag) {
  if (stddev == 0.0) return;
  uint32_t n = static_cast<uint32_t>(pts.size() / d);
  for (uint32_t i = 0; i < n; ++i) {
    RngStream s = RngStream::keyed(seed, tag, i);
    for (uint32_t c = 0; c < d; ++c) pts[size_t(i) * d + c] += stddev * s.next_normal();
  }
}

}  // namespace

LabeledDataset make_moons(uint32_t n, double noise, uint64_t seed) {
  if (n < 2) throw InvalidConfig("make_moons needs n >= 2");
  if (noise < 0.0) throw InvalidConfig("noise must be non-negative");
  const uint32_t n_out = n / 2;
  const uint32_t n_in = n - n_out;

  std::vector<double> pts(size_t(n) * 2);
  std::vector<uint32_t> labels(n);
  for (uint32_t i = 0; i < n_out; ++i) {
    double t = n_out > 1 ? kPi * i / (n_out - 1) : 0.0;
    pts[size_t(i) * 2] = std::cos(t);
    pts[size_t(i) * 2 + 1] = std::sin(t);
    labels[i] = 0;
  }
  for (uint32_t i = 0; i < n_in; ++i) {
    double t = n_in > 1 ? kPi * i / (n_in - 1) : 0.0;
    size_t at = size_t(n_out + i) * 2;
    pts[at] = 1.0 - std::cos(t);
    pts[at + 1] = 1.0 - std::sin(t) - 0.5;
    labels[n_out + i] = 1;
  }
  add_noise(pts, 2, noise, seed, kMoonsTag);
  return {Dataset(std::move(pts), n, 2), ClusterLabels{std::move(labels), 2}};
}

LabeledDataset make_circles(uint32_t n, double noise, double factor,
                            uint64_t seed) {
  if (n < 2) throw InvalidConfig("make_circles needs n >= 2");
  if (noise < 0.0) throw InvalidConfig("noise must be non-negative");
  if (!(factor > 0.0) || !(factor < 1.0))
    throw InvalidConfig("circle factor must be in (0, 1)");
  const uint32_t n_out = n / 2;
  const uint32_t n_in = n - n_out;

  std::vector<double> pts(size_t(n) * 2);
  std::vector<uint32_t> labels(n);
  for (uint32_t i = 0; i < n_out; ++i) {
    double t = 2.0 * kPi * i / n_out;
    pts[size_t(i) * 2] = std::cos(t);
    pts[size_t(i) * 2 + 1] = std::sin(t);
    labels[i] = 0;
  }
  for (uint32_t i = 0; i < n_in; ++i) {
    double t = 2.0 * kPi * i / n_in;
    size_t at = size_t(n_out + i) * 2;
    pts[at] = factor * std::cos(t);
    pts[at + 1] = factor * std::sin(t);
    labels[n_out + i] = 1;
  }
  add_noise(pts, 2, noise, seed, kCirclesTag);
  return {Dataset(std::move(pts), n, 2), ClusterLabels{std::move(labels), 2}};
}

LabeledDataset make_blobs(uint32_t n,
                          const std::vector<std::vector<double>>& centers,
                          double stddev,
                          const std::array<double, 4>& transform,
                          uint64_t seed) {
  if (centers.empty()) throw InvalidConfig("make_blobs needs >= 1 center");
  if (n < centers.size())
    throw InvalidConfig("make_blobs needs n >= number of centers");
  if (stddev < 0.0) throw InvalidConfig("stddev must be non-negative");
  const uint32_t d = static_cast<uint32_t>(centers.front().size());
  if (d == 0) throw InvalidConfig("centers must have dimension >= 1");
  for (const auto& c : centers)
    if (c.size() != d) throw InvalidConfig("centers have mixed dimensions");
  const uint32_t kc = static_cast<uint32_t>(centers.size());

  std::vector<double> pts(size_t(n) * d);
  std::vector<uint32_t> labels(n);
  uint32_t at = 0;
  for (uint32_t c = 0; c < kc; ++c) {
    uint32_t cnt = n / kc + (c < n % kc ? 1 : 0);
    for (uint32_t i = 0; i < cnt; ++i, ++at) {
      for (uint32_t a = 0; a < d; ++a)
        pts[size_t(at) * d + a] = centers[c][a];
      labels[at] = c;
    }
  }
  add_noise(pts, d, stddev, seed, kBlobsTag);

  bool identity = transform == kIdentityTransform;
  if (!identity) {
    if (d != 2)
      throw InvalidConfig("linear transform is only defined for 2-d blobs");
    for (uint32_t i = 0; i < n; ++i) {
      double x = pts[size_t(i) * 2], y = pts[size_t(i) * 2 + 1];
      pts[size_t(i) * 2] = transform[0] * x + transform[1] * y;
      pts[size_t(i) * 2 + 1] = transform[2] * x + transform[3] * y;
    }
  }
  return {Dataset(std::move(pts), n, d), ClusterLabels{std::move(labels), kc}};
}

LabeledDataset make_blobs(uint32_t n,
                          const std::vector<std::vector<double>>& centers,
                          double stddev, uint64_t seed) {
  return make_blobs(n, centers, stddev, kIdentityTransform, seed);
}

Dataset image_to_points(const Image& img, bool scale) {
  if (img.width == 0 || img.height == 0)
    throw InvalidConfig("empty raster");
  const uint32_t n = img.width * img.height;
  std::vector<double> pts(size_t(n) * 5);
  const double side = scale
      ? std::max<double>(1.0, std::max(img.width, img.height) - 1.0)
      : 1.0;
  const double color_scale = scale ? 1.0 / 255.0 : 1.0;
  size_t at = 0;
  for (uint32_t r = 0; r < img.height; ++r) {
    for (uint32_t c = 0; c < img.width; ++c) {
      const uint8_t* px = img.pixel(r, c);
      pts[at++] = px[0] * color_scale;
      pts[at++] = px[1] * color_scale;
      pts[at++] = px[2] * color_scale;
      pts[at++] = c / side;
      pts[at++] = r / side;
    }
  }
  return Dataset(std::move(pts), n, 5);
}

Image labels_to_image(const ClusterLabels& labels, uint32_t width,
                      uint32_t height, const Image* original) {
  if (labels.size() != width * height)
    throw LengthMismatch("label count does not match raster size");
  const uint32_t k = labels.k;
  std::vector<std::array<double, 3>> color(k, {0.0, 0.0, 0.0});

  if (original) {
    if (original->width != width || original->height != height)
      throw LengthMismatch("original raster size mismatch");
    std::vector<uint64_t> count(k, 0);
    for (uint32_t i = 0; i < labels.size(); ++i) {
      const uint8_t* px = original->rgb.data() + size_t(i) * 3;
      uint32_t c = labels.labels[i];
      color[c][0] += px[0];
      color[c][1] += px[1];
      color[c][2] += px[2];
      count[c]++;
    }
    for (uint32_t c = 0; c < k; ++c)
      if (count[c] > 0)
        for (int a = 0; a < 3; ++a) color[c][a] /= double(count[c]);
  } else {
    static const uint8_t palette[][3] = {
        {230, 25, 75},  {60, 180, 75},   {255, 225, 25}, {0, 130, 200},
        {245, 130, 48}, {145, 30, 180},  {70, 240, 240}, {240, 50, 230},
        {210, 245, 60}, {250, 190, 212}, {0, 128, 128},  {220, 190, 255},
        {170, 110, 40}, {255, 250, 200}, {128, 0, 0},    {170, 255, 195},
        {128, 128, 0},  {255, 215, 180}, {0, 0, 128},    {128, 128, 128},
        {255, 255, 255}, {0, 0, 0},      {233, 150, 122}, {46, 139, 87}};
    for (uint32_t c = 0; c < k; ++c)
      for (int a = 0; a < 3; ++a) color[c][a] = palette[c % 24][a];
  }

  Image out(width, height);
  for (uint32_t i = 0; i < labels.size(); ++i) {
    uint8_t* px = out.rgb.data() + size_t(i) * 3;
    for (int a = 0; a < 3; ++a)
      px[a] = static_cast<uint8_t>(
          std::clamp(std::lround(color[labels.labels[i]][a]), 0l, 255l));
  }
  return out;
}

}  // namespace fsg
