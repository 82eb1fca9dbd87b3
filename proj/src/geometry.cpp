#include "night/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace night {
namespace {

struct Candidate {
  double t = std::numeric_limits<double>::infinity();
  Vec3 normal;  // local frame, outward
  bool found = false;

  void offer(double t_new, const Vec3& n, double t_min, double t_max) {
    if (t_new > t_min && t_new < t_max && t_new < t) {
      t = t_new;
      normal = n;
      found = true;
    }
  }
};

// Real roots of a t^2 + 2 b t + c = 0 (half-b form), ascending. Degenerate
// (a == 0) falls back to the linear equation.
int solve_quadratic(double a, double b, double c, double roots[2]) {
  if (std::abs(a) < 1e-14) {
    if (std::abs(b) < 1e-300) return 0;
    roots[0] = -c / (2.0 * b);
    return 1;
  }
  const double disc = b * b - a * c;
  if (disc < 0.0) return 0;
  const double s = std::sqrt(disc);
  // Numerically stable pairing.
  const double q = -(b + std::copysign(s, b));
  double r0 = q / a;
  double r1 = q != 0.0 ? c / q : r0;
  if (r0 > r1) std::swap(r0, r1);
  roots[0] = r0;
  roots[1] = r1;
  return 2;
}

void intersect_box(const Vec3& o, const Vec3& d, const Vec3& h, double t_min, double t_max,
                   Candidate& best) {
  double t_enter = -std::numeric_limits<double>::infinity();
  double t_exit = std::numeric_limits<double>::infinity();
  int axis_enter = -1;
  int axis_exit = -1;
  for (int i = 0; i < 3; ++i) {
    const double oi = o[i];
    const double di = d[i];
    const double hi = h[i];
    if (std::abs(di) < 1e-300) {
      if (oi < -hi || oi > hi) return;
      continue;
    }
    double ta = (-hi - oi) / di;
    double tb = (hi - oi) / di;
    if (ta > tb) std::swap(ta, tb);
    if (ta > t_enter) {
      t_enter = ta;
      axis_enter = i;
    }
    if (tb < t_exit) {
      t_exit = tb;
      axis_exit = i;
    }
    if (t_enter > t_exit) return;
  }
  auto axis_normal = [&](int axis, double sign) {
    Vec3 n;
    if (axis == 0) n.x = sign;
    if (axis == 1) n.y = sign;
    if (axis == 2) n.z = sign;
    return n;
  };
  if (axis_enter >= 0) best.offer(t_enter, axis_normal(axis_enter, d[axis_enter] > 0 ? -1.0 : 1.0), t_min, t_max);
  if (axis_exit >= 0) best.offer(t_exit, axis_normal(axis_exit, d[axis_exit] > 0 ? 1.0 : -1.0), t_min, t_max);
}

void intersect_sphere(const Vec3& o, const Vec3& d, double r, double t_min, double t_max,
                      Candidate& best) {
  double roots[2];
  const int n = solve_quadratic(dot(d, d), dot(o, d), dot(o, o) - r * r, roots);
  for (int i = 0; i < n; ++i) best.offer(roots[i], (o + d * roots[i]) / r, t_min, t_max);
}

void intersect_disc(const Vec3& o, const Vec3& d, double z0, double r_in, double r_out,
                    double nz, double t_min, double t_max, Candidate& best,
                    const std::function<bool(const Vec3&)>& extra = {}) {
  if (std::abs(d.z) < 1e-300) return;
  const double t = (z0 - o.z) / d.z;
  const Vec3 p = o + d * t;
  const double rr = p.x * p.x + p.y * p.y;
  if (rr > r_out * r_out || rr < r_in * r_in) return;
  if (extra && !extra(p)) return;
  best.offer(t, {0.0, 0.0, nz}, t_min, t_max);
}

void intersect_cylinder(const Vec3& o, const Vec3& d, double r, double hh, double t_min,
                        double t_max, Candidate& best) {
  double roots[2];
  const int n = solve_quadratic(d.x * d.x + d.y * d.y, o.x * d.x + o.y * d.y,
                                o.x * o.x + o.y * o.y - r * r, roots);
  for (int i = 0; i < n; ++i) {
    const Vec3 p = o + d * roots[i];
    if (std::abs(p.z) <= hh) best.offer(roots[i], Vec3{p.x, p.y, 0.0} / r, t_min, t_max);
  }
  intersect_disc(o, d, hh, 0.0, r, 1.0, t_min, t_max, best);
  intersect_disc(o, d, -hh, 0.0, r, -1.0, t_min, t_max, best);
}

void intersect_cone(const Vec3& o, const Vec3& d, double r, double hh, double t_min, double t_max,
                    Candidate& best) {
  // x^2 + y^2 = k^2 (hh - z)^2 for z in [-hh, hh].
  const double k = r / (2.0 * hh);
  const double k2 = k * k;
  const double w = hh - o.z;
  double roots[2];
  const int n = solve_quadratic(d.x * d.x + d.y * d.y - k2 * d.z * d.z,
                                o.x * d.x + o.y * d.y + k2 * w * d.z,
                                o.x * o.x + o.y * o.y - k2 * w * w, roots);
  for (int i = 0; i < n; ++i) {
    const Vec3 p = o + d * roots[i];
    if (p.z >= -hh && p.z <= hh) {
      best.offer(roots[i], normalized(Vec3{p.x, p.y, k2 * (hh - p.z)}), t_min, t_max);
    }
  }
  intersect_disc(o, d, -hh, 0.0, r, -1.0, t_min, t_max, best);
}

void intersect_shell(const Vec3& o_local, const Vec3& d, double r_in, double arc, double hh,
                     double t_min, double t_max, Candidate& best) {
  const double r_out = r_in + kConcaveShellThickness;
  const double phi0 = arc / (2.0 * r_in);
  // Axis frame: cylinder axis through the origin.
  const Vec3 o = o_local + Vec3{r_in, 0.0, 0.0};
  auto in_angle = [phi0](const Vec3& p) { return std::abs(std::atan2(p.y, p.x)) <= phi0; };

  for (const double r : {r_in, r_out}) {
    double roots[2];
    const int n = solve_quadratic(d.x * d.x + d.y * d.y, o.x * d.x + o.y * d.y,
                                  o.x * o.x + o.y * o.y - r * r, roots);
    const double sign = r == r_in ? -1.0 : 1.0;
    for (int i = 0; i < n; ++i) {
      const Vec3 p = o + d * roots[i];
      if (std::abs(p.z) <= hh && in_angle(p)) {
        best.offer(roots[i], Vec3{p.x, p.y, 0.0} * (sign / r), t_min, t_max);
      }
    }
  }
  intersect_disc(o, d, hh, r_in, r_out, 1.0, t_min, t_max, best, in_angle);
  intersect_disc(o, d, -hh, r_in, r_out, -1.0, t_min, t_max, best, in_angle);
  for (const double s : {-1.0, 1.0}) {
    const double phi = s * phi0;
    const Vec3 radial{std::cos(phi), std::sin(phi), 0.0};
    const Vec3 tangent{-std::sin(phi), std::cos(phi), 0.0};
    const double denom = dot(d, tangent);
    if (std::abs(denom) < 1e-300) continue;
    const double t = -dot(o, tangent) / denom;
    const Vec3 p = o + d * t;
    const double along = dot(p, radial);
    if (along >= r_in && along <= r_out && std::abs(p.z) <= hh) {
      best.offer(t, tangent * s, t_min, t_max);
    }
  }
}

Vec3 local_half_extent(const Primitive& p) {
  const Vec3& s = p.size;
  switch (p.kind) {
    case PrimitiveKind::cube:
    case PrimitiveKind::parallelepiped: return s * 0.5;
    case PrimitiveKind::sphere: return {s.x, s.x, s.x};
    case PrimitiveKind::cylinder:
    case PrimitiveKind::cone: return {s.x, s.x, s.z * 0.5};
    case PrimitiveKind::concave_plane: break;
  }
  return {};
}

// 2D point set on [0,1)^2: stratified in u, golden-ratio sequence in v.
std::pair<double, double> lattice_point(std::size_t i, std::size_t n) {
  constexpr double kGolden = 0.6180339887498949;
  const double u = (double(i) + 0.5) / double(n);
  double v = (double(i) + 0.5) * kGolden;
  v -= std::floor(v);
  return {u, v};
}

struct Face {
  double area;
  // (u, v) in [0,1)^2 -> local position and outward normal (equal-area map).
  std::function<std::pair<Vec3, Vec3>(double, double)> map;
};

std::vector<Face> faces_of(const Primitive& p) {
  std::vector<Face> faces;
  const Vec3& s = p.size;
  constexpr double kTwoPi = 2.0 * kPi;

  auto add_disc = [&faces](double z, double r_in, double r_out, double phi_lo, double phi_hi,
                           double nz) {
    const double area = 0.5 * (phi_hi - phi_lo) * (r_out * r_out - r_in * r_in);
    faces.push_back({area, [=](double u, double v) {
                       const double rho = std::sqrt(r_in * r_in + u * (r_out * r_out - r_in * r_in));
                       const double phi = phi_lo + v * (phi_hi - phi_lo);
                       return std::pair{Vec3{rho * std::cos(phi), rho * std::sin(phi), z},
                                        Vec3{0.0, 0.0, nz}};
                     }});
  };

  switch (p.kind) {
    case PrimitiveKind::cube:
    case PrimitiveKind::parallelepiped: {
      const Vec3 h = s * 0.5;
      for (int axis = 0; axis < 3; ++axis) {
        const int a1 = (axis + 1) % 3;
        const int a2 = (axis + 2) % 3;
        const double area = 4.0 * h[a1] * h[a2];
        for (const double sign : {-1.0, 1.0}) {
          faces.push_back({area, [=](double u, double v) {
                             double c[3];
                             c[axis] = sign * h[axis];
                             c[a1] = (2.0 * u - 1.0) * h[a1];
                             c[a2] = (2.0 * v - 1.0) * h[a2];
                             double n[3] = {0, 0, 0};
                             n[axis] = sign;
                             return std::pair{Vec3{c[0], c[1], c[2]}, Vec3{n[0], n[1], n[2]}};
                           }});
        }
      }
      break;
    }
    case PrimitiveKind::sphere: {
      const double r = s.x;
      faces.push_back({4.0 * kPi * r * r, [=](double u, double v) {
                         const double z = 1.0 - 2.0 * u;
                         const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
                         const double phi = kTwoPi * v;
                         const Vec3 n{rho * std::cos(phi), rho * std::sin(phi), z};
                         return std::pair{n * r, n};
                       }});
      break;
    }
    case PrimitiveKind::cylinder: {
      const double r = s.x;
      const double hh = s.z * 0.5;
      faces.push_back({kTwoPi * r * s.z, [=](double u, double v) {
                         const double phi = kTwoPi * u;
                         const Vec3 n{std::cos(phi), std::sin(phi), 0.0};
                         return std::pair{Vec3{r * n.x, r * n.y, -hh + 2.0 * hh * v}, n};
                       }});
      add_disc(hh, 0.0, r, 0.0, kTwoPi, 1.0);
      add_disc(-hh, 0.0, r, 0.0, kTwoPi, -1.0);
      break;
    }
    case PrimitiveKind::cone: {
      const double r = s.x;
      const double hh = s.z * 0.5;
      const double slant = std::sqrt(r * r + s.z * s.z);
      const double k2 = (r / s.z) * (r / s.z);
      faces.push_back({kPi * r * slant, [=](double u, double v) {
                         const double frac = std::sqrt(u);  // distance from apex / slant
                         const double z = hh - s.z * frac;
                         const double rho = r * frac;
                         const double phi = kTwoPi * v;
                         const Vec3 pos{rho * std::cos(phi), rho * std::sin(phi), z};
                         const Vec3 n = normalized(Vec3{pos.x, pos.y, k2 * (hh - z)});
                         // At the apex the gradient degenerates; u > 0 keeps frac > 0.
                         return std::pair{pos, n};
                       }});
      add_disc(-hh, 0.0, r, 0.0, kTwoPi, -1.0);
      break;
    }
    case PrimitiveKind::concave_plane: {
      const double r_in = s.x;
      const double r_out = r_in + kConcaveShellThickness;
      const double phi0 = s.y / (2.0 * r_in);
      const double hh = s.z * 0.5;
      const Vec3 shift{-r_in, 0.0, 0.0};
      for (const double r : {r_in, r_out}) {
        const double sign = r == r_in ? -1.0 : 1.0;
        faces.push_back({2.0 * phi0 * r * s.z, [=](double u, double v) {
                           const double phi = -phi0 + 2.0 * phi0 * u;
                           const Vec3 radial{std::cos(phi), std::sin(phi), 0.0};
                           return std::pair{radial * r + Vec3{0, 0, -hh + 2.0 * hh * v} + shift,
                                            radial * sign};
                         }});
      }
      const std::size_t first_disc = faces.size();
      add_disc(hh, r_in, r_out, -phi0, phi0, 1.0);
      add_disc(-hh, r_in, r_out, -phi0, phi0, -1.0);
      for (std::size_t i = first_disc; i < faces.size(); ++i) {
        auto inner = faces[i].map;
        faces[i].map = [inner, shift](double u, double v) {
          auto [pos, n] = inner(u, v);
          return std::pair{pos + shift, n};
        };
      }
      for (const double sgn : {-1.0, 1.0}) {
        const double phi = sgn * phi0;
        const Vec3 radial{std::cos(phi), std::sin(phi), 0.0};
        const Vec3 tangent{-std::sin(phi), std::cos(phi), 0.0};
        faces.push_back({kConcaveShellThickness * s.z, [=](double u, double v) {
                           const double rho = r_in + u * kConcaveShellThickness;
                           return std::pair{radial * rho + Vec3{0, 0, -hh + 2.0 * hh * v} + shift,
                                            tangent * sgn};
                         }});
      }
      break;
    }
  }
  return faces;
}

}  // namespace

PrimitiveShape::PrimitiveShape(const Primitive& p)
    : prim_(p), rot_(rotation_from_euler_xyz_deg(p.pose.rotation_deg)), rot_t_(rot_.transposed()) {}

std::optional<PrimitiveShape::LocalHit> PrimitiveShape::intersect(const Ray& ray, double t_min,
                                                                  double t_max) const {
  const Vec3 o = rot_t_ * (ray.origin - prim_.pose.position);
  const Vec3 d = rot_t_ * ray.direction;
  const Vec3& s = prim_.size;
  Candidate best;
  switch (prim_.kind) {
    case PrimitiveKind::cube:
    case PrimitiveKind::parallelepiped: intersect_box(o, d, s * 0.5, t_min, t_max, best); break;
    case PrimitiveKind::sphere: intersect_sphere(o, d, s.x, t_min, t_max, best); break;
    case PrimitiveKind::cylinder: intersect_cylinder(o, d, s.x, s.z * 0.5, t_min, t_max, best); break;
    case PrimitiveKind::cone: intersect_cone(o, d, s.x, s.z * 0.5, t_min, t_max, best); break;
    case PrimitiveKind::concave_plane:
      intersect_shell(o, d, s.x, s.y, s.z * 0.5, t_min, t_max, best);
      break;
  }
  if (!best.found) return std::nullopt;
  return LocalHit{best.t, rot_ * best.normal};
}

Aabb PrimitiveShape::world_bounds() const {
  const Vec3& c = prim_.pose.position;
  if (prim_.kind == PrimitiveKind::sphere) {
    const Vec3 r{prim_.size.x, prim_.size.x, prim_.size.x};
    return {c - r, c + r};
  }
  Vec3 lo, hi;
  if (prim_.kind == PrimitiveKind::concave_plane) {
    const double r_in = prim_.size.x;
    const double r_out = r_in + kConcaveShellThickness;
    const double phi0 = prim_.size.y / (2.0 * r_in);
    const double hh = prim_.size.z * 0.5;
    lo = {r_in * std::cos(phi0) - r_in, -r_out * std::sin(phi0), -hh};
    hi = {kConcaveShellThickness, r_out * std::sin(phi0), hh};
  } else {
    hi = local_half_extent(prim_);
    lo = -hi;
  }
  Aabb box{{1e300, 1e300, 1e300}, {-1e300, -1e300, -1e300}};
  for (int corner = 0; corner < 8; ++corner) {
    const Vec3 local{(corner & 1) ? hi.x : lo.x, (corner & 2) ? hi.y : lo.y,
                     (corner & 4) ? hi.z : lo.z};
    const Vec3 w = rot_ * local + c;
    box.lo = {std::min(box.lo.x, w.x), std::min(box.lo.y, w.y), std::min(box.lo.z, w.z)};
    box.hi = {std::max(box.hi.x, w.x), std::max(box.hi.y, w.y), std::max(box.hi.z, w.z)};
  }
  return box;
}

double PrimitiveShape::surface_area() const {
  double total = 0.0;
  for (const Face& f : faces_of(prim_)) total += f.area;
  return total;
}

std::vector<SurfaceSample> PrimitiveShape::surface_samples(std::size_t count) const {
  std::vector<SurfaceSample> out;
  if (count == 0) return out;
  const std::vector<Face> faces = faces_of(prim_);
  double total = 0.0;
  for (const Face& f : faces) total += f.area;
  for (const Face& f : faces) {
    const auto n = std::max<std::size_t>(1, std::size_t(std::llround(double(count) * f.area / total)));
    for (std::size_t i = 0; i < n; ++i) {
      const auto [u, v] = lattice_point(i, n);
      const auto [pos, normal] = f.map(u, v);
      out.push_back({rot_ * pos + prim_.pose.position, rot_ * normal, f.area / double(n)});
    }
  }
  return out;
}

std::optional<double> intersect_wall(const Wall& wall, const Ray& ray, double t_min,
                                     double t_max) {
  const double denom = dot(ray.direction, wall.plane.normal);
  if (std::abs(denom) < 1e-15) return std::nullopt;
  const double t = dot(wall.plane.point - ray.origin, wall.plane.normal) / denom;
  if (!(t > t_min && t < t_max)) return std::nullopt;
  const Vec3 rel = ray.at(t) - wall.plane.point;
  if (std::abs(dot(rel, wall.u_axis)) > 0.5 * wall.width) return std::nullopt;
  if (std::abs(dot(rel, wall.v_axis())) > 0.5 * wall.height) return std::nullopt;
  return t;
}

SceneGeometry::SceneGeometry(const SceneDescription& scene) : scene_(scene) {
  objects_.reserve(scene.objects.size());
  for (const Primitive& p : scene.objects) objects_.emplace_back(p);
}

std::optional<Hit> SceneGeometry::intersect(const Ray& ray, double t_min, double t_max,
                                            unsigned filter) const {
  std::optional<Hit> best;
  double limit = t_max;
  auto take_wall = [&](const Wall& w, SurfaceKind kind, int index) {
    if (auto t = intersect_wall(w, ray, t_min, limit)) {
      limit = *t;
      Hit h;
      h.t = *t;
      h.point = ray.at(*t);
      h.normal = dot(w.plane.normal, ray.direction) > 0.0 ? -w.plane.normal : w.plane.normal;
      h.surface = kind;
      h.index = index;
      h.material = w.material;
      best = h;
    }
  };
  if ((filter & kHitFrontWall) && scene_.front_wall) take_wall(*scene_.front_wall, SurfaceKind::front_wall, -1);
  if (filter & kHitMiddleWall) take_wall(scene_.middle_wall, SurfaceKind::middle_wall, -1);
  if (filter & kHitVirtualWalls) {
    for (std::size_t i = 0; i < scene_.virtual_walls.size(); ++i) {
      take_wall(scene_.virtual_walls[i], SurfaceKind::virtual_wall, int(i));
    }
  }
  if (filter & kHitObjects) {
    for (std::size_t i = 0; i < objects_.size(); ++i) {
      if (auto lh = objects_[i].intersect(ray, t_min, limit)) {
        limit = lh->t;
        Hit h;
        h.t = lh->t;
        h.point = ray.at(lh->t);
        h.normal = dot(lh->normal, ray.direction) > 0.0 ? -lh->normal : lh->normal;
        h.surface = SurfaceKind::object;
        h.index = int(i);
        h.material = objects_[i].primitive().material;
        best = h;
      }
    }
  }
  return best;
}

bool SceneGeometry::occluded(const Vec3& a, const Vec3& b, unsigned filter) const {
  const Vec3 d = b - a;
  const double len = norm(d);
  if (len <= 2.0 * kRayEpsilon) return false;
  return intersect({a, d / len}, kRayEpsilon, len - kRayEpsilon, filter).has_value();
}

std::optional<Hit> ray_intersect(const SceneDescription& scene, const Ray& ray) {
  if (std::abs(norm(ray.direction) - 1.0) > 1e-9) {
    throw std::invalid_argument("ray_intersect: direction must be unit length");
  }
  return SceneGeometry(scene).intersect(ray);
}

std::vector<SurfaceSample> object_surface_samples(const SceneGeometry& geometry,
                                                  std::size_t count) {
  std::vector<SurfaceSample> out;
  const auto& objects = geometry.objects();
  if (objects.empty() || count == 0) return out;
  std::vector<double> areas;
  double total = 0.0;
  for (const PrimitiveShape& s : objects) {
    areas.push_back(s.surface_area());
    total += areas.back();
  }
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto n = std::max<std::size_t>(1, std::size_t(std::llround(double(count) * areas[i] / total)));
    for (SurfaceSample s : objects[i].surface_samples(n)) {
      s.object = int(i);
      out.push_back(s);
    }
  }
  return out;
}

}  // namespace night
