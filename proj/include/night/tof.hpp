#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "night/image.hpp"

namespace night::tof {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Complex iToF measurement c = re + j*im at one modulation frequency.
struct Phasor {
  double re = 0.0;
  double im = 0.0;

  constexpr Phasor operator+(const Phasor& o) const { return {re + o.re, im + o.im}; }
  constexpr Phasor operator*(double s) const { return {re * s, im * s}; }
  constexpr bool operator==(const Phasor&) const = default;
};

struct AmplitudePhase {
  double amplitude = 0.0;
  double phase = 0.0;  // radians in (-pi, pi]
};

class ModulationFrequency {
 public:
  explicit ModulationFrequency(double hz) : hz_(hz) {
    if (!(hz > 0.0)) throw std::invalid_argument("modulation frequency must be positive");
  }
  double hz() const { return hz_; }
  bool operator==(const ModulationFrequency&) const = default;

 private:
  double hz_;
};

inline constexpr std::array<double, 3> kDefaultFrequenciesHz{2.0e7, 5.0e7, 6.0e7};
inline constexpr double kGroundTruthFrequencyHz = 2.0e7;

// Path-length histogram: bin k covers round-trip optical path [k*dr, (k+1)*dr).
struct BinConfig {
  std::size_t n_bins = 2000;
  double bin_size_m = 0.01;

  double max_path_m() const { return double(n_bins) * bin_size_m; }
  bool operator==(const BinConfig&) const = default;
};

struct TransientVector {
  std::vector<double> bins;
  double bin_size_m = 0.01;

  TransientVector() = default;
  explicit TransientVector(const BinConfig& cfg)
      : bins(cfg.n_bins, 0.0), bin_size_m(cfg.bin_size_m) {}

  std::size_t n_bins() const { return bins.size(); }
  bool operator==(const TransientVector&) const = default;
};

struct TransientSplit {
  TransientVector direct;
  TransientVector global_part;
};

// One phasor plane pair at a single modulation frequency.
struct PhasorImage {
  double frequency_hz = kGroundTruthFrequencyHz;
  Image<double> re;
  Image<double> im;

  PhasorImage() = default;
  PhasorImage(double f_hz, std::uint32_t width, std::uint32_t height)
      : frequency_hz(f_hz), re(width, height), im(width, height) {}

  std::uint32_t width() const { return re.width(); }
  std::uint32_t height() const { return re.height(); }
  Phasor at(std::uint32_t x, std::uint32_t y) const { return {re.at(x, y), im.at(x, y)}; }
  void set(std::uint32_t x, std::uint32_t y, Phasor p) {
    re.at(x, y) = p.re;
    im.at(x, y) = p.im;
  }
  bool operator==(const PhasorImage&) const = default;
};

// amplitude = |c|, phase = atan2(im, re); the zero phasor has phase 0.
AmplitudePhase amplitude_phase(Phasor p);

// Phase in radians to one-way distance. Negative phases are wrapped into
// [0, 2pi) first so the result is never negative.
double depth_from_phase(double phase, ModulationFrequency f);

// One-way distance to phase, reduced into [0, 2pi).
double phase_from_depth(double depth_m, ModulationFrequency f);

// Largest one-way distance with an unambiguous phase, c / (2f).
double unambiguous_range(ModulationFrequency f);

// Projects a path-length histogram onto the iToF phasor at frequency f using
// the bin-center path (k + 0.5) * dr.
Phasor itof_from_transient(const TransientVector& x, ModulationFrequency f);

// Precomputed projection row for repeated per-pixel use.
class ProjectionKernel {
 public:
  ProjectionKernel(ModulationFrequency f, const BinConfig& bins);

  Phasor project(std::span<const double> bins) const;
  double frequency_hz() const { return hz_; }
  std::size_t n_bins() const { return cos_.size(); }

 private:
  double hz_;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

// d = c / (2 (t_pulse + delta_s)); throws std::domain_error when the
// denominator is not positive.
double dtof_pulse_depth(double t_pulse_s, double delta_s);

// Direct part is the first maximal run of nonzero bins; everything after it
// is global.
TransientSplit split_transient(const TransientVector& x);

// Per-pixel depth from wrapped phase, ignoring multipath.
DepthMap naive_depth(const PhasorImage& phasors);

}  // namespace night::tof
