#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fsg {

// 8-bit RGB raster, row-major.
struct Image {
  uint32_t width = 0;
  uint32_t height = 0;
  std::vector<uint8_t> rgb;  // 3 * width * height

  Image() = default;
  Image(uint32_t w, uint32_t h) : width(w), height(h), rgb(size_t(3) * w * h, 0) {}

  uint8_t* pixel(uint32_t row, uint32_t col) {
    return rgb.data() + 3 * (size_t(row) * width + col);
  }
  const uint8_t* pixel(uint32_t row, uint32_t col) const {
    return rgb.data() + 3 * (size_t(row) * width + col);
  }
};

// PPM (P6) always; PNG when built with libpng. Format chosen by extension.
Image read_image(const std::string& path);
void write_image(const std::string& path, const Image& img);
bool png_supported();

}  // namespace fsg
