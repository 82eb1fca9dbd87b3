#include "night/render.hpp"

#include <omp.h>

#include <algorithm>
#include <exception>
#include <limits>
#include <string>

#include "night/brdf.hpp"
#include "night/geometry.hpp"
#include "render_internal.hpp"

namespace night::render {

namespace detail {

std::vector<WallPatch> front_wall_patches(const SceneGeometry& geo, const Vec3& emitter,
                                          const RenderConfig& cfg) {
  const Wall& wall = *geo.scene().front_wall;
  const Vec3 u = wall.u_axis;
  const Vec3 v = wall.v_axis();
  const double area = wall.width * wall.height / double(cfg.wall_patches_u * cfg.wall_patches_v);
  const double intensity = emitter_intensity(cfg);
  std::vector<WallPatch> patches;
  patches.reserve(std::size_t(cfg.wall_patches_u) * cfg.wall_patches_v);
  for (std::uint32_t j = 0; j < cfg.wall_patches_v; ++j) {
    for (std::uint32_t i = 0; i < cfg.wall_patches_u; ++i) {
      WallPatch p;
      p.center = wall.plane.point + u * (((i + 0.5) / cfg.wall_patches_u - 0.5) * wall.width) +
                 v * (((j + 0.5) / cfg.wall_patches_v - 0.5) * wall.height);
      p.area = area;
      const Vec3 to_e = emitter - p.center;
      p.dist_emitter = norm(to_e);
      p.to_emitter = to_e / p.dist_emitter;
      p.normal = dot(wall.plane.normal, to_e) >= 0.0 ? wall.plane.normal : -wall.plane.normal;
      const double cos_e = dot(p.normal, p.to_emitter);
      if (cos_e > 0.0 && !geo.occluded(p.center, emitter)) {
        p.irradiance = intensity * cos_e / (p.dist_emitter * p.dist_emitter);
      }
      patches.push_back(p);
    }
  }
  return patches;
}

void require_nlos(const SceneGeometry& geo, const Camera& cam) {
  for (std::uint32_t y = 0; y < cam.intrinsics.height; ++y) {
    for (std::uint32_t x = 0; x < cam.intrinsics.width; ++x) {
      const auto hit = geo.intersect(camera_ray(cam, x, y));
      if (hit && hit->surface == SurfaceKind::object) {
        throw NlosViolation("pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                            ") sees a hidden object directly");
      }
    }
  }
}

void add_direct(std::span<double> bins, const Ray& ray, const Hit& hit, double intensity,
                double inv_bin_size) {
  const Vec3 back = -ray.direction;
  const double cos_w = dot(hit.normal, back);
  if (cos_w <= 0.0) return;
  const double irradiance = intensity * cos_w / (hit.t * hit.t);
  const double radiance = irradiance * brdf_eval(hit.material, back, back, hit.normal);
  deposit(bins, 2.0 * hit.t, radiance, inv_bin_size);
}

void require_front_wall(const SceneDescription& scene, const char* who) {
  if (!scene.front_wall) throw std::invalid_argument(std::string(who) + ": scene has no front wall");
}

}  // namespace detail

namespace {

using detail::WallPatch;

// Emitter -> patch -> sample contributions, flattened per object sample.
struct IncidentPaths {
  std::vector<SurfaceSample> samples;
  std::vector<std::size_t> offsets;  // samples.size() + 1 entries
  std::vector<double> path;          // |e - u| + |u - o|
  std::vector<double> irradiance;    // irradiance at o through patch u
};

IncidentPaths gather_incident(const SceneGeometry& geo, const Vec3& emitter,
                              const RenderConfig& cfg) {
  IncidentPaths out;
  out.samples = object_surface_samples(geo, cfg.object_samples);
  const std::vector<WallPatch> patches = detail::front_wall_patches(geo, emitter, cfg);
  const Material& wall_mat = geo.scene().front_wall->material;

  const std::size_t n = out.samples.size();
  std::vector<std::vector<std::pair<double, double>>> per_sample(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t s = 0; s < std::ptrdiff_t(n); ++s) {
    const SurfaceSample& o = out.samples[std::size_t(s)];
    auto& list = per_sample[std::size_t(s)];
    for (const WallPatch& u : patches) {
      if (u.irradiance <= 0.0) continue;
      const Vec3 d = o.position - u.center;
      const double dist = norm(d);
      const Vec3 dir = d / dist;
      const double cos_u = dot(u.normal, dir);
      const double cos_o = -dot(o.normal, dir);
      if (cos_u <= 0.0 || cos_o <= 0.0) continue;
      if (geo.occluded(u.center, o.position)) continue;
      const double f_u = brdf_eval(wall_mat, u.to_emitter, dir, u.normal);
      const double e = u.irradiance * f_u * u.area * cos_u * cos_o / (dist * dist);
      if (e > 0.0) list.emplace_back(u.dist_emitter + dist, e);
    }
  }
  out.offsets.push_back(0);
  for (const auto& list : per_sample) {
    for (const auto& [p, e] : list) {
      out.path.push_back(p);
      out.irradiance.push_back(e);
    }
    out.offsets.push_back(out.path.size());
  }
  return out;
}

// Fills one pixel's histogram (zeroed by the caller).
void shade_nlos_pixel(const SceneGeometry& geo, const Camera& cam, const IncidentPaths& inc,
                      double intensity, double inv_bin, std::uint32_t x, std::uint32_t y,
                      std::span<double> bins) {
  const Ray ray = camera_ray(cam, x, y);
  const auto hit = geo.intersect(ray);
  if (!hit) return;
  detail::add_direct(bins, ray, *hit, intensity, inv_bin);

  const Vec3 w = hit->point;
  const Vec3 to_sensor = -ray.direction;
  const double dist_ws = hit->t;
  for (std::size_t s = 0; s < inc.samples.size(); ++s) {
    if (inc.offsets[s] == inc.offsets[s + 1]) continue;
    const SurfaceSample& o = inc.samples[s];
    const Vec3 d = o.position - w;
    const double dist = norm(d);
    const Vec3 dir = d / dist;
    const double cos_w = dot(hit->normal, dir);
    const double cos_o = -dot(o.normal, dir);
    if (cos_w <= 0.0 || cos_o <= 0.0) continue;
    if (geo.occluded(w, o.position)) continue;
    const double albedo = geo.objects()[std::size_t(o.object)].primitive().material.albedo;
    const double f_w = brdf_eval(hit->material, dir, to_sensor, hit->normal);
    const double factor = albedo / kPi * o.area * cos_o * cos_w / (dist * dist) * f_w;
    if (factor <= 0.0) continue;
    for (std::size_t k = inc.offsets[s]; k < inc.offsets[s + 1]; ++k) {
      detail::deposit(bins, (inc.path[k] + dist) + dist_ws, factor * inc.irradiance[k], inv_bin);
    }
  }
}

void validate(const RenderConfig& cfg) {
  if (cfg.wall_patches_u == 0 || cfg.wall_patches_v == 0 || cfg.object_samples == 0) {
    throw std::invalid_argument("render config: patch grid and object samples must be >= 1");
  }
  if (cfg.bins.n_bins == 0 || !(cfg.bins.bin_size_m > 0.0)) {
    throw std::invalid_argument("render config: invalid bin configuration");
  }
}

// Runs body(x, y, thread_scratch) over all pixels; exceptions are rethrown
// after the parallel region.
template <typename Body>
void for_each_pixel(std::uint32_t width, std::uint32_t height, std::size_t scratch, Body body) {
  std::exception_ptr failure;
  const std::ptrdiff_t total = std::ptrdiff_t(width) * height;
#pragma omp parallel
  {
    std::vector<double> buffer(scratch);
#pragma omp for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < total; ++i) {
      try {
        body(std::uint32_t(i % width), std::uint32_t(i / width), std::span<double>(buffer));
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

tof::TransientVector TransientImage::transient(std::uint32_t x, std::uint32_t y) const {
  tof::TransientVector v;
  v.bin_size_m = bins_.bin_size_m;
  const auto px = pixel(x, y);
  v.bins.assign(px.begin(), px.end());
  return v;
}

Camera render_camera(const SceneDescription& scene, const RenderConfig& cfg) {
  Camera cam = scene.camera;
  if (cfg.width != 0) cam.intrinsics.width = cfg.width;
  if (cfg.height != 0) cam.intrinsics.height = cfg.height;
  return cam;
}

TransientImage render_transient_nlos(const SceneDescription& scene, const RenderConfig& cfg) {
  validate(cfg);
  detail::require_front_wall(scene, "render_transient_nlos");
  const SceneGeometry geo(scene);
  const Camera cam = render_camera(scene, cfg);
  detail::require_nlos(geo, cam);
  const IncidentPaths inc = gather_incident(geo, cam.position, cfg);
  const double intensity = detail::emitter_intensity(cfg);
  const double inv_bin = 1.0 / cfg.bins.bin_size_m;

  TransientImage image(cam.intrinsics.width, cam.intrinsics.height, cfg.bins);
  for_each_pixel(image.width(), image.height(), 0,
                 [&](std::uint32_t x, std::uint32_t y, std::span<double>) {
                   shade_nlos_pixel(geo, cam, inc, intensity, inv_bin, x, y, image.pixel(x, y));
                 });
  return image;
}

std::vector<tof::PhasorImage> render_itof_nlos(const SceneDescription& scene,
                                               const RenderConfig& cfg,
                                               std::span<const double> frequencies_hz) {
  validate(cfg);
  detail::require_front_wall(scene, "render_itof_nlos");
  const SceneGeometry geo(scene);
  const Camera cam = render_camera(scene, cfg);
  detail::require_nlos(geo, cam);
  const IncidentPaths inc = gather_incident(geo, cam.position, cfg);
  const double intensity = detail::emitter_intensity(cfg);
  const double inv_bin = 1.0 / cfg.bins.bin_size_m;

  std::vector<tof::ProjectionKernel> kernels;
  std::vector<tof::PhasorImage> out;
  for (double f : frequencies_hz) {
    kernels.emplace_back(tof::ModulationFrequency(f), cfg.bins);
    out.emplace_back(f, cam.intrinsics.width, cam.intrinsics.height);
  }
  for_each_pixel(cam.intrinsics.width, cam.intrinsics.height, cfg.bins.n_bins,
                 [&](std::uint32_t x, std::uint32_t y, std::span<double> bins) {
                   std::fill(bins.begin(), bins.end(), 0.0);
                   shade_nlos_pixel(geo, cam, inc, intensity, inv_bin, x, y, bins);
                   for (std::size_t f = 0; f < kernels.size(); ++f) {
                     out[f].set(x, y, kernels[f].project(bins));
                   }
                 });
  return out;
}

LosGroundTruth render_los_gt(const SceneDescription& mirrored_scene, tof::ModulationFrequency f,
                             const RenderConfig& cfg) {
  if (mirrored_scene.front_wall) {
    throw std::invalid_argument("render_los_gt: expected a mirrored scene without front wall");
  }
  const SceneGeometry geo(mirrored_scene);
  const Camera cam = render_camera(mirrored_scene, cfg);
  const std::uint32_t w = cam.intrinsics.width;
  const std::uint32_t h = cam.intrinsics.height;
  const double intensity = detail::emitter_intensity(cfg);

  LosGroundTruth gt{DepthMap(w, h), SegMask(w, h), tof::PhasorImage(f.hz(), w, h)};
  for_each_pixel(w, h, 0, [&](std::uint32_t x, std::uint32_t y, std::span<double>) {
    const Ray ray = camera_ray(cam, x, y);
    const auto hit = geo.intersect(ray);
    if (!hit || hit->surface != SurfaceKind::object) return;
    const double d = hit->t;
    const double cos_o = std::max(0.0, dot(hit->normal, -ray.direction));
    const double amplitude = hit->material.albedo / kPi * intensity * cos_o / (d * d);
    const double phase = tof::phase_from_depth(d, f);
    gt.depth.at(x, y) = d;
    gt.mask.at(x, y) = 1;
    gt.phasor.set(x, y, {amplitude * std::cos(phase), amplitude * std::sin(phase)});
  });
  return gt;
}

TransientImage render_transient_mirrorwall(const SceneDescription& scene,
                                           const RenderConfig& cfg) {
  validate(cfg);
  detail::require_front_wall(scene, "render_transient_mirrorwall");
  if (!scene.front_wall->material.specular) {
    throw std::invalid_argument("render_transient_mirrorwall: front wall must be an ideal mirror");
  }
  const SceneGeometry geo(scene);
  const Camera cam = render_camera(scene, cfg);
  const double intensity = detail::emitter_intensity(cfg);
  const double inv_bin = 1.0 / cfg.bins.bin_size_m;
  const Plane& mirror = scene.front_wall->plane;

  TransientImage image(cam.intrinsics.width, cam.intrinsics.height, cfg.bins);
  for_each_pixel(image.width(), image.height(), 0,
                 [&](std::uint32_t x, std::uint32_t y, std::span<double>) {
                   const Ray ray = camera_ray(cam, x, y);
                   const auto first = geo.intersect(ray);
                   if (!first || first->surface != SurfaceKind::front_wall) return;
                   const Ray bounced{first->point, reflect_direction(ray.direction, mirror)};
                   const auto second =
                       geo.intersect(bounced, kRayEpsilon, std::numeric_limits<double>::infinity(),
                                     kHitMiddleWall | kHitVirtualWalls | kHitObjects);
                   if (!second || second->surface != SurfaceKind::object) return;
                   const double length = first->t + second->t;
                   const double cos_o = std::max(0.0, dot(second->normal, -bounced.direction));
                   const double radiance =
                       second->material.albedo / kPi * intensity * cos_o / (length * length);
                   detail::deposit(image.pixel(x, y), 2.0 * length, radiance, inv_bin);
                 });
  return image;
}

}  // namespace night::render
