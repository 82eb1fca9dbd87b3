#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace night {

// Row-major (y then x) single-channel image.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(std::uint32_t width, std::uint32_t height, T fill = T{})
      : width_(width), height_(height), pixels_(std::size_t(width) * height, fill) {}

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  std::size_t size() const { return pixels_.size(); }
  bool empty() const { return pixels_.empty(); }

  T& at(std::uint32_t x, std::uint32_t y) { return pixels_[std::size_t(y) * width_ + x]; }
  const T& at(std::uint32_t x, std::uint32_t y) const {
    return pixels_[std::size_t(y) * width_ + x];
  }
  T& operator[](std::size_t i) { return pixels_[i]; }
  const T& operator[](std::size_t i) const { return pixels_[i]; }

  std::vector<T>& data() { return pixels_; }
  const std::vector<T>& data() const { return pixels_; }

  bool same_shape(std::uint32_t w, std::uint32_t h) const { return width_ == w && height_ == h; }
  template <typename U>
  bool same_shape(const Image<U>& o) const {
    return width_ == o.width() && height_ == o.height();
  }

  bool operator==(const Image&) const = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  std::vector<T> pixels_;
};

// Metric depth in meters; 0 marks background.
using DepthMap = Image<double>;
// 1 = object, 0 = background.
using SegMask = Image<std::uint8_t>;

template <typename A, typename B>
void require_same_shape(const Image<A>& a, const Image<B>& b, const char* what) {
  if (!a.same_shape(b)) {
    throw std::invalid_argument(std::string(what) + ": image dimensions differ");
  }
}

}  // namespace night
