#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "night/vec3.hpp"

namespace night {

struct Ray {
  Vec3 origin;
  Vec3 direction;  // unit length

  Vec3 at(double t) const { return origin + direction * t; }
};

struct Plane {
  Vec3 point;
  Vec3 normal;  // unit length
};

// Throws std::invalid_argument unless |normal| == 1 within 1e-12.
Plane make_plane(const Vec3& point, const Vec3& normal);

struct Material {
  double albedo = 0.8;
  double roughness = 1.0;  // 1 = Lambertian, lower values add a glossy lobe
  bool specular = false;   // ideal mirror; roughness is ignored when set

  bool operator==(const Material&) const = default;
};

// Finite rectangle. `width` runs along u_axis, `height` along cross(normal, u_axis).
struct Wall {
  Plane plane;
  Vec3 u_axis;
  double width = 0.0;
  double height = 0.0;
  Material material;

  Vec3 v_axis() const { return cross(plane.normal, u_axis); }
};

enum class PrimitiveKind { cube, cylinder, sphere, concave_plane, cone, parallelepiped };

inline constexpr PrimitiveKind kAllPrimitiveKinds[] = {
    PrimitiveKind::cube,          PrimitiveKind::cylinder, PrimitiveKind::sphere,
    PrimitiveKind::concave_plane, PrimitiveKind::cone,     PrimitiveKind::parallelepiped};

std::string_view to_string(PrimitiveKind kind);
PrimitiveKind primitive_kind_from_string(std::string_view name);

struct Pose {
  Vec3 position;      // meters
  Vec3 rotation_deg;  // Euler XYZ, degrees

  bool operator==(const Pose&) const = default;
};

// Local frame is centered at pose.position; the symmetry axis (cylinder, cone,
// concave plane) is local z. Meaning of `size` per kind:
//   cube, parallelepiped: full edge lengths (x, y, z)
//   sphere:               x = radius
//   cylinder:             x = radius, z = height
//   cone:                 x = base radius, z = height (base at -z/2, apex at +z/2)
//   concave_plane:        x = curvature radius, y = arc length, z = height;
//                         a 1 cm thick cylindrical shell bulging toward +x
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::sphere;
  Pose pose;
  Vec3 size{0.2, 0.0, 0.0};
  Material material;

  bool operator==(const Primitive&) const = default;
};

inline constexpr double kConcaveShellThickness = 0.01;

// Volume of the primitive's local bounding box (m^3).
double bounding_volume(const Primitive& p);

struct CameraIntrinsics {
  std::uint32_t width = 320;
  std::uint32_t height = 240;
  double hfov_deg = 60.0;

  double vfov_deg() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

// Pinhole camera; rotation follows the Blender convention (looks down local -z,
// local +y is up).
struct Camera {
  CameraIntrinsics intrinsics;
  Vec3 position{1.0, -1.0, 1.65};
  Vec3 rotation_deg{90.0, 0.0, 50.0};

  Vec3 forward() const;
  Vec3 right() const;
  Vec3 up() const;
};

struct SceneDescription {
  static constexpr int kSchemaVersion = 1;

  std::optional<Wall> front_wall;
  Wall middle_wall;
  Camera camera;
  std::vector<Primitive> objects;
  // Set by mirror_transform: the front wall that was turned into a mirror and
  // the mirror images of the remaining walls.
  std::optional<Wall> removed_front_wall;
  std::vector<Wall> virtual_walls;

  double wall_roughness() const;
  bool is_mirrored() const { return !front_wall.has_value() && removed_front_wall.has_value(); }
};

// Corner geometry (Z up): front wall is the plane x = 0 spanning y in [-4, 4],
// z in [0, 4]; the occluding middle wall is the plane y = 0 spanning
// x in [0.7, 4.0]; the camera sits at (1, -1, 1.65) looking at the corner.
SceneDescription make_corner_scene(double wall_roughness = 1.0);

// Lowest x reachable by the camera through the corridor; object points beyond
// it (with y > 0) are hidden by the middle wall.
double middle_wall_near_edge(const SceneDescription& scene);

Vec3 reflect_point(const Vec3& p, const Plane& mirror);
Vec3 reflect_direction(const Vec3& d, const Plane& mirror);
Primitive reflect_primitive(const Primitive& p, const Plane& mirror);

// Removes the front wall and flips every object (and adds the mirror image of
// the middle wall as a virtual occluder). Applied to a mirrored scene it
// restores the original.
SceneDescription mirror_transform(const SceneDescription& scene);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct SamplingConfig {
  Range x{1.0, 1.3};
  Range y{0.5, 1.3};
  Range z{1.25, 1.95};
  Range rotation_deg{-90.0, 90.0};
  double roughness_min = 0.30;
  double roughness_step = 0.05;
  int roughness_steps = 15;
  double composite_probability = 1.0 / 7.0;
  double max_bounding_volume = 0.5;
  // Minimum gap between any object point and the corridor/middle wall.
  double clearance = 0.02;
};

// Deterministic given seed. Positions, rotations and roughness are uniform in
// the configured ranges; object sizes are re-drawn (and shrunk if needed) until
// the object is fully hidden from the camera.
SceneDescription sample_scene(std::uint64_t seed, const SamplingConfig& config = {});

// Pinhole ray through the pixel center. Throws std::out_of_range for pixels
// outside the intrinsics.
Ray camera_ray(const Camera& camera, std::uint32_t px, std::uint32_t py);

}  // namespace night
