#include "fsg/image.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>

#include "fsg/common.hpp"

#ifdef FSG_HAVE_PNG
#include <png.h>
#endif

namespace fsg {

namespace {

bool ends_with(const std::string& s, const std::string& suffix) {
  if (s.size() < suffix.size()) return false;
  std::string tail = s.substr(s.size() - suffix.size());
  for (auto& c : tail) c = static_cast<char>(std::tolower(c));
  return tail == suffix;
}

int next_ppm_token(std::istream& in) {
  // Skips whitespace and '#' comments per the PPM grammar.
  int c = in.get();
  for (;;) {
    while (c != EOF && std::isspace(c)) c = in.get();
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
      continue;
    }
    break;
  }
  int value = 0;
  bool any = false;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    any = true;
    c = in.get();
  }
  if (!any) throw UnsupportedFormat("malformed PPM header");
  return value;
}

Image read_ppm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  char magic[2];
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '6')
    throw UnsupportedFormat(path + ": not a binary PPM (P6) file");
  int w = next_ppm_token(in);
  int h = next_ppm_token(in);
  int maxval = next_ppm_token(in);
  if (w <= 0 || h <= 0 || maxval != 255)
    throw UnsupportedFormat(path + ": unsupported PPM geometry or depth");
  Image img(static_cast<uint32_t>(w), static_cast<uint32_t>(h));
  in.read(reinterpret_cast<char*>(img.rgb.data()),
          static_cast<std::streamsize>(img.rgb.size()));
  if (!in) throw IoError(path + ": truncated PPM payload");
  return img;
}

void write_ppm(const std::string& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
  if (!out) throw IoError("failed writing " + path);
}

#ifdef FSG_HAVE_PNG

Image read_png(const std::string& path) {
  FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) throw IoError("cannot open " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw IoError("libpng initialization failed");
  }
  Image img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    throw UnsupportedFormat(path + ": PNG decode failed");
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  png_set_expand(png);
  png_set_strip_16(png);
  png_set_strip_alpha(png);
  png_set_gray_to_rgb(png);
  png_read_update_info(png, info);
  img.width = png_get_image_width(png, info);
  img.height = png_get_image_height(png, info);
  img.rgb.assign(size_t(3) * img.width * img.height, 0);
  rows.resize(img.height);
  for (uint32_t r = 0; r < img.height; ++r)
    rows[r] = img.rgb.data() + size_t(3) * img.width * r;
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return img;
}

void write_png(const std::string& path, const Image& img) {
  FILE* fp = std::fopen(path.c_str(), "wb");
  if (!fp) throw IoError("cannot write " + path);
  png_structp png =
      png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError("libpng initialization failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    throw IoError(path + ": PNG encode failed");
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (uint32_t r = 0; r < img.height; ++r)
    png_write_row(png, const_cast<png_bytep>(img.rgb.data() +
                                             size_t(3) * img.width * r));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  std::fclose(fp);
}

#endif  // FSG_HAVE_PNG

}  // namespace

bool png_supported() {
#ifdef FSG_HAVE_PNG
  return true;
#else
  return false;
#endif
}

Image read_image(const std::string& path) {
  if (ends_with(path, ".ppm")) return read_ppm(path);
  if (ends_with(path, ".png")) {
#ifdef FSG_HAVE_PNG
    return read_png(path);
#else
    throw UnsupportedFormat("built without PNG support");
#endif
  }
  throw UnsupportedFormat(path + ": expected .ppm or .png");
}

void write_image(const std::string& path, const Image& img) {
  if (img.width == 0 || img.height == 0)
    throw InvalidConfig("refusing to write an empty raster");
  if (ends_with(path, ".ppm")) {
    write_ppm(path, img);
    return;
  }
  if (ends_with(path, ".png")) {
#ifdef FSG_HAVE_PNG
    write_png(path, img);
    return;
#else
    throw UnsupportedFormat("built without PNG support");
#endif
  }
  throw UnsupportedFormat(path + ": expected .ppm or .png");
}

}  // namespace fsg
