#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "night/png_io.hpp"

using namespace night;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / "night_test_png";
  fs::create_directories(d);
  return d / name;
}

}  // namespace

TEST(Png16, RoundTrip) {
  Image<std::uint16_t> img(7, 5);
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = std::uint16_t(i * 1499 + 3);
  img[0] = 65535;
  write_png16(img, tmp("a.png"));
  const Png16 r = read_png16(tmp("a.png"));
  EXPECT_EQ(r.pixels, img);
  EXPECT_EQ(r.depth_scale, 0.0);
}

TEST(Png16, DepthScaleChunk) {
  DepthMap d(4, 3);
  d.at(1, 1) = 2.34567;
  d.at(3, 2) = 6.5535;
  write_depth_png(d, tmp("d.png"));
  const Png16 r = read_png16(tmp("d.png"));
  EXPECT_EQ(r.depth_scale, kDepthPngScale);
  EXPECT_EQ(r.pixels.at(1, 1), 23457);
  EXPECT_EQ(r.pixels.at(3, 2), 65535);
  EXPECT_EQ(r.pixels.at(0, 0), 0);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(r.pixels[i] / r.depth_scale, d[i], 0.5e-4);
}

TEST(Png16, RejectsOutOfRange) {
  DepthMap d(2, 2);
  d[0] = 6.6;
  EXPECT_THROW(write_depth_png(d, tmp("x.png")), std::invalid_argument);
  d[0] = -0.1;
  EXPECT_THROW(write_depth_png(d, tmp("x.png")), std::invalid_argument);
  d[0] = 0.0;
  EXPECT_THROW(write_depth_png(d, tmp("x.png"), 0.0), std::invalid_argument);
}

TEST(Png16, PlaneMapping) {
  Image<double> p(3, 1);
  p[0] = -2.0;
  p[1] = 0.0;
  p[2] = 5.0;
  write_plane_png(p, -1.0, 1.0, tmp("p.png"));
  const Png16 r = read_png16(tmp("p.png"));
  EXPECT_EQ(r.pixels[0], 0);
  EXPECT_EQ(r.pixels[1], 32768);
  EXPECT_EQ(r.pixels[2], 65535);
  EXPECT_THROW(write_plane_png(p, 1.0, 1.0, tmp("p.png")), std::invalid_argument);
}

TEST(Png16, ReadErrors) {
  EXPECT_THROW(read_png16(tmp("missing.png")), std::runtime_error);
  std::ofstream(tmp("junk.png")) << "definitely not a png";
  EXPECT_THROW(read_png16(tmp("junk.png")), std::runtime_error);
  EXPECT_THROW(write_png16(Image<std::uint16_t>(2, 2), tmp("nodir") / "x.png"), std::runtime_error);
}
