#include "night/vec3.hpp"

#include <algorithm>

namespace night {

Mat3 rotation_from_euler_xyz_deg(const Vec3& deg) {
  const double a = deg_to_rad(deg.x);
  const double b = deg_to_rad(deg.y);
  const double c = deg_to_rad(deg.z);
  const double ca = std::cos(a), sa = std::sin(a);
  const double cb = std::cos(b), sb = std::sin(b);
  const double cc = std::cos(c), sc = std::sin(c);
  const Mat3 rx{{1, 0, 0, 0, ca, -sa, 0, sa, ca}};
  const Mat3 ry{{cb, 0, sb, 0, 1, 0, -sb, 0, cb}};
  const Mat3 rz{{cc, -sc, 0, sc, cc, 0, 0, 0, 1}};
  return rz * (ry * rx);
}

Vec3 euler_xyz_deg_from_rotation(const Mat3& r) {
  const double sb = std::clamp(-r(2, 0), -1.0, 1.0);
  const double b = std::asin(sb);
  double a = 0.0;
  double c = 0.0;
  if (std::abs(sb) < 1.0 - 1e-12) {
    a = std::atan2(r(2, 1), r(2, 2));
    c = std::atan2(r(1, 0), r(0, 0));
  } else {
    // Gimbal lock: only a +/- c is determined; put it all in a.
    a = std::atan2(-r(1, 2), r(1, 1));
  }
  return {rad_to_deg(a), rad_to_deg(b), rad_to_deg(c)};
}

}  // namespace night
