#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "night/scene.hpp"

namespace night {

enum class SurfaceKind : std::uint8_t { front_wall, middle_wall, virtual_wall, object };

struct Hit {
  double t = 0.0;
  Vec3 point;
  Vec3 normal;  // faces the incoming ray
  SurfaceKind surface = SurfaceKind::object;
  int index = -1;  // object index, or virtual wall index
  Material material;
};

// Bit mask selecting which surfaces a query considers.
enum HitFilter : unsigned {
  kHitFrontWall = 1u,
  kHitMiddleWall = 2u,
  kHitVirtualWalls = 4u,
  kHitObjects = 8u,
  kHitWalls = kHitFrontWall | kHitMiddleWall | kHitVirtualWalls,
  kHitAll = kHitWalls | kHitObjects,
};

inline constexpr double kRayEpsilon = 1e-6;

struct Aabb {
  Vec3 lo;
  Vec3 hi;
};

struct SurfaceSample {
  Vec3 position;
  Vec3 normal;  // outward
  double area = 0.0;
  int object = -1;
};

// Primitive with its rotation precomputed.
class PrimitiveShape {
 public:
  explicit PrimitiveShape(const Primitive& p);

  struct LocalHit {
    double t;
    Vec3 normal;  // outward, world frame
  };

  // Nearest intersection with t in (t_min, t_max).
  std::optional<LocalHit> intersect(const Ray& ray, double t_min, double t_max) const;

  Aabb world_bounds() const;
  double surface_area() const;
  // About `count` area-weighted stratified samples (deterministic).
  std::vector<SurfaceSample> surface_samples(std::size_t count) const;

  const Primitive& primitive() const { return prim_; }
  const Mat3& rotation() const { return rot_; }

 private:
  Primitive prim_;
  Mat3 rot_;
  Mat3 rot_t_;
};

// Precomputed intersection structure for a scene.
class SceneGeometry {
 public:
  explicit SceneGeometry(const SceneDescription& scene);

  std::optional<Hit> intersect(const Ray& ray, double t_min = kRayEpsilon,
                               double t_max = std::numeric_limits<double>::infinity(),
                               unsigned filter = kHitAll) const;

  // True when something blocks the open segment between a and b.
  bool occluded(const Vec3& a, const Vec3& b, unsigned filter = kHitAll) const;

  const std::vector<PrimitiveShape>& objects() const { return objects_; }
  const SceneDescription& scene() const { return scene_; }

 private:
  SceneDescription scene_;
  std::vector<PrimitiveShape> objects_;
};

std::optional<double> intersect_wall(const Wall& wall, const Ray& ray, double t_min,
                                     double t_max);

// Nearest positive hit over walls and objects.
std::optional<Hit> ray_intersect(const SceneDescription& scene, const Ray& ray);

// Samples over all objects (count split by surface area).
std::vector<SurfaceSample> object_surface_samples(const SceneGeometry& geometry,
                                                  std::size_t count);

}  // namespace night
