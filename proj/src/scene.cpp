#include "night/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "night/geometry.hpp"

namespace night {

Plane make_plane(const Vec3& point, const Vec3& normal) {
  if (std::abs(norm(normal) - 1.0) > 1e-12) {
    throw std::invalid_argument("plane normal must be unit length");
  }
  return {point, normal};
}

std::string_view to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::cube: return "cube";
    case PrimitiveKind::cylinder: return "cylinder";
    case PrimitiveKind::sphere: return "sphere";
    case PrimitiveKind::concave_plane: return "concave_plane";
    case PrimitiveKind::cone: return "cone";
    case PrimitiveKind::parallelepiped: return "parallelepiped";
  }
  return "unknown";
}

PrimitiveKind primitive_kind_from_string(std::string_view name) {
  for (PrimitiveKind k : kAllPrimitiveKinds) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown primitive kind: " + std::string(name));
}

double bounding_volume(const Primitive& p) {
  const Vec3& s = p.size;
  switch (p.kind) {
    case PrimitiveKind::cube:
    case PrimitiveKind::parallelepiped: return s.x * s.y * s.z;
    case PrimitiveKind::sphere: return 8.0 * s.x * s.x * s.x;
    case PrimitiveKind::cylinder:
    case PrimitiveKind::cone: return 4.0 * s.x * s.x * s.z;
    case PrimitiveKind::concave_plane: {
      const double half_angle = s.y / (2.0 * s.x);
      const double outer = s.x + kConcaveShellThickness;
      const double depth = outer - s.x * std::cos(half_angle);
      return depth * 2.0 * outer * std::sin(half_angle) * s.z;
    }
  }
  return 0.0;
}

double CameraIntrinsics::vfov_deg() const {
  const double half_h = std::tan(deg_to_rad(hfov_deg) / 2.0);
  return rad_to_deg(2.0 * std::atan(half_h * double(height) / double(width)));
}

Vec3 Camera::forward() const { return rotation_from_euler_xyz_deg(rotation_deg) * Vec3{0, 0, -1}; }
Vec3 Camera::right() const { return rotation_from_euler_xyz_deg(rotation_deg) * Vec3{1, 0, 0}; }
Vec3 Camera::up() const { return rotation_from_euler_xyz_deg(rotation_deg) * Vec3{0, 1, 0}; }

double SceneDescription::wall_roughness() const {
  if (front_wall) return front_wall->material.roughness;
  if (removed_front_wall) return removed_front_wall->material.roughness;
  return 1.0;
}

SceneDescription make_corner_scene(double wall_roughness) {
  SceneDescription s;
  Wall front;
  front.plane = make_plane({0.0, 0.0, 2.0}, {1.0, 0.0, 0.0});
  front.u_axis = {0.0, 1.0, 0.0};
  front.width = 8.0;
  front.height = 4.0;
  front.material = Material{0.8, wall_roughness, false};
  s.front_wall = front;

  s.middle_wall.plane = make_plane({2.35, 0.0, 2.0}, {0.0, -1.0, 0.0});
  s.middle_wall.u_axis = {1.0, 0.0, 0.0};
  s.middle_wall.width = 3.30;
  s.middle_wall.height = 4.0;
  s.middle_wall.material = Material{0.8, 1.0, false};
  return s;
}

double middle_wall_near_edge(const SceneDescription& scene) {
  const Wall& w = scene.middle_wall;
  return w.plane.point.x - 0.5 * w.width * std::abs(w.u_axis.x);
}

Vec3 reflect_point(const Vec3& p, const Plane& mirror) {
  return p - 2.0 * dot(p - mirror.point, mirror.normal) * mirror.normal;
}

Vec3 reflect_direction(const Vec3& d, const Plane& mirror) {
  return d - 2.0 * dot(d, mirror.normal) * mirror.normal;
}

namespace {

Mat3 reflection_matrix(const Vec3& n) {
  Mat3 m;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) m(r, c) = (r == c ? 1.0 : 0.0) - 2.0 * n[r] * n[c];
  return m;
}

Wall reflect_wall(const Wall& w, const Plane& mirror) {
  Wall out = w;
  out.plane.point = reflect_point(w.plane.point, mirror);
  out.plane.normal = reflect_direction(w.plane.normal, mirror);
  out.u_axis = reflect_direction(w.u_axis, mirror);
  return out;
}

}  // namespace

Primitive reflect_primitive(const Primitive& p, const Plane& mirror) {
  // Every primitive is symmetric under local y -> -y, so M * R * diag(1,-1,1)
  // is a proper rotation describing the same reflected shape.
  const Mat3 rot = rotation_from_euler_xyz_deg(p.pose.rotation_deg);
  const Mat3 reflected = reflection_matrix(mirror.normal) * rot * Mat3::diagonal(1.0, -1.0, 1.0);
  Primitive out = p;
  out.pose.position = reflect_point(p.pose.position, mirror);
  out.pose.rotation_deg = euler_xyz_deg_from_rotation(reflected);
  return out;
}

SceneDescription mirror_transform(const SceneDescription& scene) {
  SceneDescription out = scene;
  if (scene.front_wall) {
    const Plane& mirror = scene.front_wall->plane;
    out.front_wall.reset();
    out.removed_front_wall = scene.front_wall;
    out.virtual_walls = {reflect_wall(scene.middle_wall, mirror)};
    for (Primitive& p : out.objects) p = reflect_primitive(p, mirror);
    return out;
  }
  if (scene.removed_front_wall) {
    const Plane& mirror = scene.removed_front_wall->plane;
    out.front_wall = scene.removed_front_wall;
    out.removed_front_wall.reset();
    out.virtual_walls.clear();
    for (Primitive& p : out.objects) p = reflect_primitive(p, mirror);
    return out;
  }
  throw std::invalid_argument("mirror_transform: scene has no front wall");
}

namespace {

double uniform(std::mt19937_64& rng, const Range& r) {
  return std::uniform_real_distribution<double>(r.lo, r.hi)(rng);
}

Vec3 sample_size(std::mt19937_64& rng, PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::cube: {
      const double a = uniform(rng, {0.2, 0.45});
      return {a, a, a};
    }
    case PrimitiveKind::parallelepiped:
      return {uniform(rng, {0.1, 0.6}), uniform(rng, {0.1, 0.6}), uniform(rng, {0.1, 0.6})};
    case PrimitiveKind::sphere: return {uniform(rng, {0.1, 0.25}), 0.0, 0.0};
    case PrimitiveKind::cylinder: return {uniform(rng, {0.08, 0.22}), 0.0, uniform(rng, {0.2, 0.6})};
    case PrimitiveKind::cone: return {uniform(rng, {0.1, 0.25}), 0.0, uniform(rng, {0.2, 0.6})};
    case PrimitiveKind::concave_plane:
      return {uniform(rng, {0.4, 0.8}), uniform(rng, {0.3, 0.6}), uniform(rng, {0.3, 0.6})};
  }
  return {};
}

bool fits_hidden_region(const Primitive& p, double near_edge, const SamplingConfig& cfg) {
  if (bounding_volume(p) > cfg.max_bounding_volume) return false;
  const Aabb box = PrimitiveShape(p).world_bounds();
  return box.lo.x >= near_edge + cfg.clearance && box.lo.y >= cfg.clearance;
}

Primitive sample_primitive(std::mt19937_64& rng, const SamplingConfig& cfg, double near_edge) {
  Primitive p;
  const auto kind_index = std::uniform_int_distribution<int>(0, 5)(rng);
  p.kind = kAllPrimitiveKinds[kind_index];
  p.pose.position = {uniform(rng, cfg.x), uniform(rng, cfg.y), uniform(rng, cfg.z)};
  p.pose.rotation_deg = {uniform(rng, cfg.rotation_deg), uniform(rng, cfg.rotation_deg),
                         uniform(rng, cfg.rotation_deg)};
  p.material = Material{0.8, 1.0, false};

  // Pose stays as drawn; only the size adapts so the object never peeks
  // around the corner.
  for (int attempt = 0; attempt < 32; ++attempt) {
    p.size = sample_size(rng, p.kind);
    if (fits_hidden_region(p, near_edge, cfg)) return p;
  }
  while (!fits_hidden_region(p, near_edge, cfg)) p.size = p.size * 0.9;
  return p;
}

}  // namespace

SceneDescription sample_scene(std::uint64_t seed, const SamplingConfig& config) {
  if (config.x.lo > config.x.hi || config.y.lo > config.y.hi || config.z.lo > config.z.hi ||
      config.rotation_deg.lo > config.rotation_deg.hi || config.roughness_steps < 1) {
    throw std::invalid_argument("sample_scene: empty sampling range");
  }
  std::mt19937_64 rng(seed);
  const int step = std::uniform_int_distribution<int>(0, config.roughness_steps - 1)(rng);
  // Exact decimal grid values (0.30, 0.35, ...).
  const double roughness =
      std::round((config.roughness_min + step * config.roughness_step) * 100.0) / 100.0;

  SceneDescription scene = make_corner_scene(roughness);
  const double near_edge = middle_wall_near_edge(scene);
  const bool composite = std::bernoulli_distribution(config.composite_probability)(rng);
  scene.objects.push_back(sample_primitive(rng, config, near_edge));
  if (composite) scene.objects.push_back(sample_primitive(rng, config, near_edge));
  return scene;
}

Ray camera_ray(const Camera& camera, std::uint32_t px, std::uint32_t py) {
  const CameraIntrinsics& in = camera.intrinsics;
  if (px >= in.width || py >= in.height) throw std::out_of_range("camera_ray: pixel out of range");
  const Mat3 r = rotation_from_euler_xyz_deg(camera.rotation_deg);
  const Vec3 forward = r * Vec3{0, 0, -1};
  const Vec3 right = r * Vec3{1, 0, 0};
  const Vec3 up = r * Vec3{0, 1, 0};
  const double tan_h = std::tan(deg_to_rad(in.hfov_deg) / 2.0);
  const double tan_v = tan_h * double(in.height) / double(in.width);
  const double sx = (2.0 * (double(px) + 0.5) / double(in.width) - 1.0) * tan_h;
  const double sy = (1.0 - 2.0 * (double(py) + 0.5) / double(in.height)) * tan_v;
  return {camera.position, normalized(forward + right * sx + up * sy)};
}

}  // namespace night
