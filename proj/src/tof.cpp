#include "night/tof.hpp"

#include <cmath>

#include "night/vec3.hpp"

namespace night::tof {
namespace {

constexpr double kTwoPi = 2.0 * kPi;

double wrap_to_two_pi(double phase) {
  double r = std::fmod(phase, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

}  // namespace

AmplitudePhase amplitude_phase(Phasor p) {
  if (p.re == 0.0 && p.im == 0.0) return {0.0, 0.0};
  double phase = std::atan2(p.im, p.re);
  // atan2 returns -pi for (negative, -0.0); the contract is (-pi, pi].
  if (phase <= -kPi) phase = kPi;
  return {std::hypot(p.re, p.im), phase};
}

double depth_from_phase(double phase, ModulationFrequency f) {
  if (phase < 0.0) phase += kTwoPi;
  return kSpeedOfLight * phase / (4.0 * kPi * f.hz());
}

double phase_from_depth(double depth_m, ModulationFrequency f) {
  return wrap_to_two_pi(4.0 * kPi * f.hz() * depth_m / kSpeedOfLight);
}

double unambiguous_range(ModulationFrequency f) { return kSpeedOfLight / (2.0 * f.hz()); }

Phasor itof_from_transient(const TransientVector& x, ModulationFrequency f) {
  const double k = kTwoPi * f.hz() / kSpeedOfLight;
  Phasor acc;
  for (std::size_t i = 0; i < x.bins.size(); ++i) {
    const double e = x.bins[i];
    if (e == 0.0) continue;
    const double arg = k * (double(i) + 0.5) * x.bin_size_m;
    acc.re += e * std::cos(arg);
    acc.im += e * std::sin(arg);
  }
  return acc;
}

ProjectionKernel::ProjectionKernel(ModulationFrequency f, const BinConfig& bins)
    : hz_(f.hz()), cos_(bins.n_bins), sin_(bins.n_bins) {
  const double k = kTwoPi * f.hz() / kSpeedOfLight;
  for (std::size_t i = 0; i < bins.n_bins; ++i) {
    const double arg = k * (double(i) + 0.5) * bins.bin_size_m;
    cos_[i] = std::cos(arg);
    sin_[i] = std::sin(arg);
  }
}

Phasor ProjectionKernel::project(std::span<const double> bins) const {
  if (bins.size() != cos_.size()) {
    throw std::invalid_argument("projection kernel: bin count mismatch");
  }
  Phasor acc;
  for (std::size_t i = 0; i < bins.size(); ++i) {
    acc.re += bins[i] * cos_[i];
    acc.im += bins[i] * sin_[i];
  }
  return acc;
}

double dtof_pulse_depth(double t_pulse_s, double delta_s) {
  const double denom = t_pulse_s + delta_s;
  if (!(denom > 0.0)) throw std::domain_error("dtof_pulse_depth: t_pulse + delta_s must be > 0");
  return kSpeedOfLight / (2.0 * denom);
}

TransientSplit split_transient(const TransientVector& x) {
  TransientSplit out;
  out.direct.bin_size_m = out.global_part.bin_size_m = x.bin_size_m;
  out.direct.bins.assign(x.bins.size(), 0.0);
  out.global_part.bins.assign(x.bins.size(), 0.0);

  std::size_t i = 0;
  const std::size_t n = x.bins.size();
  while (i < n && x.bins[i] == 0.0) ++i;
  for (; i < n && x.bins[i] != 0.0; ++i) out.direct.bins[i] = x.bins[i];
  for (; i < n; ++i) out.global_part.bins[i] = x.bins[i];
  return out;
}

DepthMap naive_depth(const PhasorImage& phasors) {
  const ModulationFrequency f(phasors.frequency_hz);
  DepthMap depth(phasors.width(), phasors.height());
  for (std::size_t i = 0; i < depth.size(); ++i) {
    depth[i] = depth_from_phase(amplitude_phase({phasors.re[i], phasors.im[i]}).phase, f);
  }
  return depth;
}

}  // namespace night::tof
