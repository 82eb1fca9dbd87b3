#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "night/brdf.hpp"

using namespace night;

namespace {

const Vec3 kNormal{0, 0, 1};

Vec3 from_angles(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

// Midpoint quadrature of brdf * cos(theta_out) over the hemisphere in
// (cos theta, phi), which has a unit Jacobian.
double directional_albedo(const Material& m, const Vec3& w_in, int n_mu, int n_phi) {
  double sum = 0.0;
  for (int i = 0; i < n_mu; ++i) {
    const double mu = (i + 0.5) / n_mu;
    for (int j = 0; j < n_phi; ++j) {
      const double phi = 2 * kPi * (j + 0.5) / n_phi;
      const double s = std::sqrt(1 - mu * mu);
      const Vec3 w_out{s * std::cos(phi), s * std::sin(phi), mu};
      sum += brdf_eval(m, w_in, w_out, kNormal) * mu;
    }
  }
  return sum * (1.0 / n_mu) * (2 * kPi / n_phi);
}

}  // namespace

TEST(Brdf, LambertianWhenRoughnessOne) {
  const Material m{0.8, 1.0, false};
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> th(0.0, kPi / 2 - 1e-3), ph(0.0, 2 * kPi);
  for (int i = 0; i < 500; ++i) {
    EXPECT_DOUBLE_EQ(brdf_eval(m, from_angles(th(rng), ph(rng)), from_angles(th(rng), ph(rng)), kNormal),
                     0.8 / kPi);
  }
}

TEST(Brdf, LobeMapping) {
  const GlossyLobe one = lobe_from_roughness(1.0);
  EXPECT_EQ(one.weight, 0.0);
  EXPECT_EQ(one.exponent, 0.0);
  const GlossyLobe sharp = lobe_from_roughness(0.3);
  EXPECT_NEAR(sharp.weight, 0.7, 1e-15);
  EXPECT_NEAR(sharp.exponent, 2 / 0.09 - 2, 1e-12);
  double prev = -1.0;
  for (double a = 1.0; a >= 0.3 - 1e-12; a -= 0.05) {
    const double e = lobe_from_roughness(a).exponent;
    EXPECT_GT(e, prev);
    prev = e;
  }
}

TEST(Brdf, EnergyConservationByQuadrature) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> alpha(0.3, 1.0), th(0.0, 1.4), ph(0.0, 2 * kPi);
  for (int i = 0; i < 30; ++i) {
    const Material m{0.8, alpha(rng), false};
    const Vec3 w_in = from_angles(th(rng), ph(rng));
    const double a = directional_albedo(m, w_in, 400, 400);
    EXPECT_LE(a, 0.8 * (1 + 2e-3)) << "alpha " << m.roughness;
    EXPECT_GT(a, 0.0);
  }
  // Normal incidence conserves exactly (up to quadrature error).
  const Material m{0.8, 0.3, false};
  EXPECT_NEAR(directional_albedo(m, kNormal, 800, 64), 0.8, 2e-3);
}

TEST(Brdf, LobePeaksAtMirrorDirection) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> th(0.1, 1.2), ph(0.0, 2 * kPi);
  for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
    const Material m{0.8, alpha, false};
    const Vec3 w_in = from_angles(th(rng), ph(rng));
    const Vec3 mirror = mirror_about_normal(w_in, kNormal);
    double best = -1.0;
    Vec3 arg;
    for (int i = 0; i < 180; ++i) {
      for (int j = 0; j < 360; ++j) {
        const Vec3 w = from_angles((i + 0.5) * (kPi / 2) / 180, (j + 0.5) * 2 * kPi / 360);
        const double v = brdf_eval(m, w_in, w, kNormal);
        if (v > best) {
          best = v;
          arg = w;
        }
      }
    }
    EXPECT_LT(std::acos(std::min(1.0, dot(arg, mirror))), 0.02) << alpha;
    EXPECT_NEAR(brdf_eval(m, w_in, mirror, kNormal),
                (1 - lobe_from_roughness(alpha).weight) * 0.8 / kPi +
                    lobe_from_roughness(alpha).weight * 0.8 * (lobe_from_roughness(alpha).exponent + 2) / (2 * kPi),
                1e-12);
  }
}

TEST(Brdf, BelowHemisphereIsZero) {
  const Material m{0.8, 0.5, false};
  EXPECT_EQ(brdf_eval(m, {0, 0, -1}, {0, 0, 1}, kNormal), 0.0);
  EXPECT_EQ(brdf_eval(m, {0, 0, 1}, normalized(Vec3{1, 0, -1}), kNormal), 0.0);
}

TEST(Brdf, RejectsBadInput) {
  const Material m{0.8, 0.5, false};
  EXPECT_THROW(brdf_eval(m, {0, 0, 2}, {0, 0, 1}, kNormal), std::invalid_argument);
  EXPECT_THROW(brdf_eval(m, {0, 0, 1}, {0, 0.1, 1}, kNormal), std::invalid_argument);
  EXPECT_THROW(brdf_eval(m, {0, 0, 1}, {0, 0, 1}, {0, 0, 0.5}), std::invalid_argument);
  EXPECT_THROW(brdf_eval(Material{0.8, 1.0, true}, {0, 0, 1}, {0, 0, 1}, kNormal), std::invalid_argument);
}

TEST(Brdf, MirrorAboutNormal) {
  const Vec3 w = normalized(Vec3{1, 2, 3});
  const Vec3 r = mirror_about_normal(w, kNormal);
  EXPECT_NEAR(r.x, -w.x, 1e-15);
  EXPECT_NEAR(r.y, -w.y, 1e-15);
  EXPECT_NEAR(r.z, w.z, 1e-15);
}
