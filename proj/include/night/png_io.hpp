#pragma once

#include <cstdint>
#include <filesystem>

#include "night/image.hpp"

namespace night {

// Depth PNGs store round(depth * scale) as 16-bit grayscale; the scale is
// recorded in a "depth_scale" text chunk.
inline constexpr double kDepthPngScale = 10000.0;  // 0.1 mm per count

struct Png16 {
  Image<std::uint16_t> pixels;
  double depth_scale = 0.0;  // 0 when the chunk is absent
};

void write_png16(const Image<std::uint16_t>& pixels, const std::filesystem::path& path,
                 double depth_scale = 0.0);
Png16 read_png16(const std::filesystem::path& path);

// Throws std::invalid_argument for depths that do not fit the 16-bit range.
void write_depth_png(const DepthMap& depth, const std::filesystem::path& path,
                     double scale = kDepthPngScale);

// Linear map of [lo, hi] onto [0, 65535]; values outside are clamped.
void write_plane_png(const Image<double>& plane, double lo, double hi,
                     const std::filesystem::path& path);

}  // namespace night
