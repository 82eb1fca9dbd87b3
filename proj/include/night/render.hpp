#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "night/image.hpp"
#include "night/scene.hpp"
#include "night/tof.hpp"

namespace night::render {

struct RenderConfig {
  // Front-wall quadrature grid for the emitter -> wall -> object leg.
  std::uint32_t wall_patches_u = 64;
  std::uint32_t wall_patches_v = 32;
  std::size_t object_samples = 256;
  // 0 keeps the camera intrinsics.
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  // Isotropic point emitter co-located with the camera (arbitrary units).
  double emitter_power = 1.0;
  tof::BinConfig bins;
};

class TransientImage {
 public:
  TransientImage() = default;
  TransientImage(std::uint32_t width, std::uint32_t height, const tof::BinConfig& bins)
      : width_(width), height_(height), bins_(bins),
        data_(std::size_t(width) * height * bins.n_bins, 0.0) {}

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  const tof::BinConfig& bins() const { return bins_; }

  std::span<double> pixel(std::uint32_t x, std::uint32_t y) {
    return {data_.data() + (std::size_t(y) * width_ + x) * bins_.n_bins, bins_.n_bins};
  }
  std::span<const double> pixel(std::uint32_t x, std::uint32_t y) const {
    return {data_.data() + (std::size_t(y) * width_ + x) * bins_.n_bins, bins_.n_bins};
  }
  tof::TransientVector transient(std::uint32_t x, std::uint32_t y) const;

  const std::vector<double>& data() const { return data_; }
  bool operator==(const TransientImage&) const = default;

 private:
  std::uint32_t width_ = 0;
  std::uint32_t height_ = 0;
  tof::BinConfig bins_;
  std::vector<double> data_;
};

// A camera pixel sees part of a hidden object directly.
class NlosViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Camera with the configured resolution override applied.
Camera render_camera(const SceneDescription& scene, const RenderConfig& cfg);

// Direct wall return plus the emitter -> front wall -> object -> wall -> sensor
// path, evaluated by quadrature over wall patches and object surface samples.
// Parallel over pixels; bit-identical for any thread count.
TransientImage render_transient_nlos(const SceneDescription& scene, const RenderConfig& cfg);

// Same transport as render_transient_nlos, projected per pixel onto the given
// modulation frequencies without keeping the full transient image.
std::vector<tof::PhasorImage> render_itof_nlos(const SceneDescription& scene,
                                               const RenderConfig& cfg,
                                               std::span<const double> frequencies_hz);

struct LosGroundTruth {
  DepthMap depth;
  SegMask mask;
  tof::PhasorImage phasor;
};

// Line-of-sight render of a mirrored scene. Object pixels get the hit distance,
// mask 1 and phasor A * exp(j * phase_from_depth(d, f)) with
// A = albedo / pi * I * cos / d^2; everything else is background (0).
LosGroundTruth render_los_gt(const SceneDescription& mirrored_scene, tof::ModulationFrequency f,
                             const RenderConfig& cfg = {});

// Front wall as an ideal mirror: each pixel ray is reflected specularly and
// energy from the object it reaches is binned at the full round trip. The
// direct wall return is omitted.
TransientImage render_transient_mirrorwall(const SceneDescription& scene, const RenderConfig& cfg);

namespace reference {

// Serial evaluation of every emitter -> patch -> sample -> wall -> sensor path
// with no precomputation. Slow; kept as an oracle for the parallel kernels.
TransientImage render_transient_nlos(const SceneDescription& scene, const RenderConfig& cfg);

}  // namespace reference

}  // namespace night::render
