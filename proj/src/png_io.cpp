#include "night/png_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace night {

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const { std::fclose(f); }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

void png_warn(png_structp, png_const_charp) {}

[[noreturn]] void png_fail(png_structp png, png_const_charp) { png_longjmp(png, 1); }

}  // namespace

void write_png16(const Image<std::uint16_t>& pixels, const std::filesystem::path& path,
                 double depth_scale) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw std::runtime_error("png: out of memory");
  }
  std::vector<png_byte> row(std::size_t(pixels.width()) * 2);
  std::string scale_text;
  png_text text{};
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("png: failed writing '" + path.string() + "'");
  }
  {
    png_init_io(png, file.get());
    png_set_IHDR(png, info, pixels.width(), pixels.height(), 16, PNG_COLOR_TYPE_GRAY,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    if (depth_scale > 0.0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.17g", depth_scale);
      scale_text = buf;
      text.compression = PNG_TEXT_COMPRESSION_NONE;
      text.key = const_cast<char*>("depth_scale");
      text.text = scale_text.data();
      png_set_text(png, info, &text, 1);
    }
    png_write_info(png, info);
    for (std::uint32_t y = 0; y < pixels.height(); ++y) {
      for (std::uint32_t x = 0; x < pixels.width(); ++x) {
        const std::uint16_t v = pixels.at(x, y);
        row[2 * x] = png_byte(v >> 8);
        row[2 * x + 1] = png_byte(v & 0xFF);
      }
      png_write_row(png, row.data());
    }
    png_write_end(png, nullptr);
  }
  png_destroy_write_struct(&png, &info);
}

Png16 read_png16(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw std::runtime_error("cannot open '" + path.string() + "'");
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, png_fail, png_warn);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!info) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    throw std::runtime_error("png: out of memory");
  }
  Png16 out;
  std::vector<png_byte> row;
  bool wrong_format = false;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("png: failed reading '" + path.string() + "'");
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  wrong_format = png_get_bit_depth(png, info) != 16 ||
                 png_get_color_type(png, info) != PNG_COLOR_TYPE_GRAY;
  if (!wrong_format) {
    const std::uint32_t w = png_get_image_width(png, info);
    const std::uint32_t h = png_get_image_height(png, info);
    out.pixels = Image<std::uint16_t>(w, h);
    row.resize(std::size_t(w) * 2);
    for (std::uint32_t y = 0; y < h; ++y) {
      png_read_row(png, row.data(), nullptr);
      for (std::uint32_t x = 0; x < w; ++x) {
        out.pixels.at(x, y) = std::uint16_t((row[2 * x] << 8) | row[2 * x + 1]);
      }
    }
    png_read_end(png, info);
    png_textp texts = nullptr;
    int n = 0;
    png_get_text(png, info, &texts, &n);
    for (int i = 0; i < n; ++i) {
      if (std::string(texts[i].key) == "depth_scale") out.depth_scale = std::strtod(texts[i].text, nullptr);
    }
  }
  png_destroy_read_struct(&png, &info, nullptr);
  if (wrong_format) throw std::runtime_error("png: '" + path.string() + "' is not 16-bit grayscale");
  return out;
}

void write_depth_png(const DepthMap& depth, const std::filesystem::path& path, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("depth png: scale must be > 0");
  Image<std::uint16_t> px(depth.width(), depth.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    const double v = std::round(depth[i] * scale);
    if (!(v >= 0.0 && v <= 65535.0)) {
      throw std::invalid_argument("depth png: depth " + std::to_string(depth[i]) +
                                  " m does not fit at scale " + std::to_string(scale));
    }
    px[i] = std::uint16_t(v);
  }
  write_png16(px, path, scale);
}

void write_plane_png(const Image<double>& plane, double lo, double hi,
                     const std::filesystem::path& path) {
  if (!(hi > lo)) throw std::invalid_argument("plane png: empty value range");
  Image<std::uint16_t> px(plane.width(), plane.height());
  for (std::size_t i = 0; i < plane.size(); ++i) {
    const double t = std::clamp((plane[i] - lo) / (hi - lo), 0.0, 1.0);
    px[i] = std::uint16_t(std::lround(t * 65535.0));
  }
  write_png16(px, path);
}

}  // namespace night
