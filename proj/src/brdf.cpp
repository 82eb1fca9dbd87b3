#include "night/brdf.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace night {
namespace {

void require_unit(const Vec3& v, const char* name) {
  if (std::abs(dot(v, v) - 1.0) > 1e-9) {
    throw std::invalid_argument(std::string("brdf_eval: ") + name + " is not unit length");
  }
}

}  // namespace

GlossyLobe lobe_from_roughness(double roughness) {
  const double a = std::clamp(roughness, 1e-3, 1.0);
  return {1.0 - a, 2.0 / (a * a) - 2.0};
}

Vec3 mirror_about_normal(const Vec3& w, const Vec3& n) { return 2.0 * dot(n, w) * n - w; }

double brdf_eval(const Material& m, const Vec3& w_in, const Vec3& w_out, const Vec3& n) {
  require_unit(w_in, "w_in");
  require_unit(w_out, "w_out");
  require_unit(n, "normal");
  if (m.specular) throw std::invalid_argument("brdf_eval: ideal mirror has no finite BRDF");
  if (dot(n, w_in) <= 0.0 || dot(n, w_out) <= 0.0) return 0.0;

  const double diffuse = m.albedo / kPi;
  const GlossyLobe lobe = lobe_from_roughness(m.roughness);
  if (lobe.weight <= 0.0) return diffuse;
  const double c = dot(mirror_about_normal(w_in, n), w_out);
  const double glossy =
      c > 0.0 ? m.albedo * (lobe.exponent + 2.0) / (2.0 * kPi) * std::pow(c, lobe.exponent) : 0.0;
  return (1.0 - lobe.weight) * diffuse + lobe.weight * glossy;
}

}  // namespace night
