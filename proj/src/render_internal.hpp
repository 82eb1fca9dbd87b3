#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "night/geometry.hpp"
#include "night/render.hpp"

namespace night::render::detail {

struct WallPatch {
  Vec3 center;
  Vec3 normal;  // faces the emitter
  double area = 0.0;
  double dist_emitter = 0.0;
  Vec3 to_emitter;    // unit
  double irradiance = 0.0;  // from the emitter; 0 when shadowed
};

inline double emitter_intensity(const RenderConfig& cfg) {
  return cfg.emitter_power / (4.0 * kPi);
}

// Patch centers on the front wall with their emitter irradiance.
std::vector<WallPatch> front_wall_patches(const SceneGeometry& geo, const Vec3& emitter,
                                          const RenderConfig& cfg);

// Adds `energy` to the bin containing round-trip path `path`; paths beyond
// the histogram are dropped.
inline void deposit(std::span<double> bins, double path, double energy, double inv_bin_size) {
  const double k = std::floor(path * inv_bin_size);
  if (k >= 0.0 && k < double(bins.size())) bins[std::size_t(k)] += energy;
}

// Throws NlosViolation if any pixel's first hit is an object.
void require_nlos(const SceneGeometry& geo, const Camera& cam);

// Direct wall return for a pixel whose first hit is `hit`.
void add_direct(std::span<double> bins, const Ray& ray, const Hit& hit, double intensity,
                double inv_bin_size);

void require_front_wall(const SceneDescription& scene, const char* who);

}  // namespace night::render::detail
