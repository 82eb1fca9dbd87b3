#include <cmath>

#include "night/brdf.hpp"
#include "night/geometry.hpp"
#include "night/render.hpp"
#include "render_internal.hpp"

namespace night::render::reference {

TransientImage render_transient_nlos(const SceneDescription& scene, const RenderConfig& cfg) {
  detail::require_front_wall(scene, "reference::render_transient_nlos");
  const SceneGeometry geo(scene);
  const Camera cam = render_camera(scene, cfg);
  detail::require_nlos(geo, cam);
  const Vec3 emitter = cam.position;
  const double intensity = detail::emitter_intensity(cfg);
  const double inv_bin = 1.0 / cfg.bins.bin_size_m;
  const Wall& wall = *scene.front_wall;
  const std::vector<SurfaceSample> samples = object_surface_samples(geo, cfg.object_samples);
  const double patch_area =
      wall.width * wall.height / double(cfg.wall_patches_u * cfg.wall_patches_v);

  TransientImage image(cam.intrinsics.width, cam.intrinsics.height, cfg.bins);
  for (std::uint32_t y = 0; y < image.height(); ++y) {
    for (std::uint32_t x = 0; x < image.width(); ++x) {
      auto bins = image.pixel(x, y);
      const Ray ray = camera_ray(cam, x, y);
      const auto hit = geo.intersect(ray);
      if (!hit) continue;
      detail::add_direct(bins, ray, *hit, intensity, inv_bin);

      for (std::uint32_t j = 0; j < cfg.wall_patches_v; ++j) {
        for (std::uint32_t i = 0; i < cfg.wall_patches_u; ++i) {
          const Vec3 u = wall.plane.point +
                         wall.u_axis * (((i + 0.5) / cfg.wall_patches_u - 0.5) * wall.width) +
                         wall.v_axis() * (((j + 0.5) / cfg.wall_patches_v - 0.5) * wall.height);
          const double d_eu = distance(emitter, u);
          const Vec3 u_to_e = (emitter - u) / d_eu;
          const Vec3 n_u = dot(wall.plane.normal, u_to_e) >= 0.0 ? wall.plane.normal
                                                                  : -wall.plane.normal;
          const double cos_e = dot(n_u, u_to_e);
          if (cos_e <= 0.0 || geo.occluded(u, emitter)) continue;

          for (const SurfaceSample& o : samples) {
            const double d_uo = distance(u, o.position);
            const Vec3 u_to_o = (o.position - u) / d_uo;
            const double cos_u = dot(n_u, u_to_o);
            const double cos_o_in = -dot(o.normal, u_to_o);
            if (cos_u <= 0.0 || cos_o_in <= 0.0 || geo.occluded(u, o.position)) continue;

            const double d_ow = distance(o.position, hit->point);
            const Vec3 w_to_o = (o.position - hit->point) / d_ow;
            const double cos_w = dot(hit->normal, w_to_o);
            const double cos_o_out = -dot(o.normal, w_to_o);
            if (cos_w <= 0.0 || cos_o_out <= 0.0 || geo.occluded(hit->point, o.position)) continue;

            const double albedo = scene.objects[std::size_t(o.object)].material.albedo;
            const double throughput =
                intensity * cos_e / (d_eu * d_eu) *
                brdf_eval(wall.material, u_to_e, u_to_o, n_u) * patch_area * cos_u * cos_o_in /
                (d_uo * d_uo) * (albedo / kPi) * o.area * cos_o_out * cos_w / (d_ow * d_ow) *
                brdf_eval(hit->material, w_to_o, -ray.direction, hit->normal);
            detail::deposit(bins, ((d_eu + d_uo) + d_ow) + hit->t, throughput, inv_bin);
          }
        }
      }
    }
  }
  return image;
}

}  // namespace night::render::reference
