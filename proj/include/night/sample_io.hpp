#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "night/image.hpp"
#include "night/scene.hpp"
#include "night/tof.hpp"

namespace night {

struct ObjectMeta {
  PrimitiveKind kind = PrimitiveKind::sphere;
  Pose pose;
  bool operator==(const ObjectMeta&) const = default;
};

struct SampleMeta {
  std::uint64_t scene_seed = 0;
  std::vector<ObjectMeta> objects;
  double roughness = 1.0;
  std::string split;  // "train", "test" or empty
  bool operator==(const SampleMeta&) const = default;
};

// One dataset sample. Planes are held in double precision; the container
// stores them as IEEE-754 single precision.
struct SampleRecord {
  std::string id;
  std::vector<tof::PhasorImage> inputs;  // one per frequency, 20/50/60 MHz by default
  tof::PhasorImage gt_phasor;            // mirrored scene at 20 MHz
  DepthMap gt_depth;
  SegMask gt_mask;
  SampleMeta meta;

  std::uint32_t width() const { return gt_depth.width(); }
  std::uint32_t height() const { return gt_depth.height(); }
};

// Rounds every plane to single precision, i.e. to exactly what the container
// can represent.
void quantize_to_storage(SampleRecord& record);

class SampleFormatError : public std::runtime_error {
 public:
  enum class Kind { bad_magic, bad_version, truncated, bad_header, trailing_data };

  SampleFormatError(Kind kind, std::string section, const std::string& message)
      : std::runtime_error(message), kind_(kind), section_(std::move(section)) {}

  Kind kind() const { return kind_; }
  const std::string& section() const { return section_; }

 private:
  Kind kind_;
  std::string section_;
};

class SampleIoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr char kSampleMagic[4] = {'N', 'L', 'O', 'S'};
inline constexpr std::uint32_t kSampleFormatVersion = 1;

// Little-endian layout:
//   "NLOS" | u32 version | u32 height | u32 width | u32 n_freq | f64 freq[n_freq]
//   f32 planes, row-major: input re x n_freq, input im x n_freq,
//                          gt re, gt im, gt depth, gt mask (0/1)
std::vector<std::uint8_t> encode_sample(const SampleRecord& record);
SampleRecord decode_sample(std::span<const std::uint8_t> bytes);

void write_sample(const SampleRecord& record, const std::filesystem::path& path);
SampleRecord parse_sample(const std::filesystem::path& path);

}  // namespace night
