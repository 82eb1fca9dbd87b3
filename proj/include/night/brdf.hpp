#pragma once

#include "night/scene.hpp"

namespace night {

// Glossy lobe parameters derived from wall roughness alpha in [0.3, 1]:
//   weight   = 1 - alpha          (alpha = 1 -> pure Lambertian)
//   exponent = 2 / alpha^2 - 2    (alpha = 0.3 -> ~20.2, alpha = 1 -> 0)
struct GlossyLobe {
  double weight = 0.0;
  double exponent = 0.0;
};

GlossyLobe lobe_from_roughness(double roughness);

// Mirror of `w` about the normal `n` (both pointing away from the surface).
Vec3 mirror_about_normal(const Vec3& w, const Vec3& n);

// Reflectance per steradian for light arriving from w_in and leaving along
// w_out (both point away from the surface):
//   (1 - s) * albedo / pi + s * albedo * (e + 2) / (2 pi) * max(0, r . w_out)^e
// with r the mirror direction of w_in. Returns 0 below the hemisphere.
// Throws std::invalid_argument for non-unit vectors or an ideal mirror
// material (a delta distribution that callers trace explicitly).
double brdf_eval(const Material& m, const Vec3& w_in, const Vec3& w_out, const Vec3& n);

}  // namespace night
