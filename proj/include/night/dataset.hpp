#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "night/render.hpp"
#include "night/sample_io.hpp"
#include "night/scene.hpp"

namespace night {

struct DatasetConfig {
  render::RenderConfig render;
  std::vector<double> frequencies_hz{tof::kDefaultFrequenciesHz.begin(),
                                     tof::kDefaultFrequenciesHz.end()};
  SamplingConfig sampling;
  double train_ratio = 0.8;
  // Percentile of the training-split 20 MHz amplitude used as normalization K.
  double normalization_percentile = 99.9;
  std::size_t n_scenes = 8;  // used when the caller gives no explicit count
  double noise_sigma = 0.02;
};

// Raised for malformed configuration documents.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses the dataset config JSON (unknown keys are rejected).
DatasetConfig dataset_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const DatasetConfig& cfg);
DatasetConfig load_dataset_config(const std::filesystem::path& path);

struct ManifestEntry {
  std::string id;
  std::string file;  // relative to the manifest directory
  SampleMeta meta;
};

struct DatasetManifest {
  static constexpr int kFormatVersion = 1;

  int format_version = kFormatVersion;
  std::vector<double> frequencies_hz;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  tof::BinConfig bins;
  double normalization_k = 1.0;
  std::uint64_t master_seed = 0;
  std::vector<ManifestEntry> samples;
};

nlohmann::json to_json(const DatasetManifest& m);
DatasetManifest manifest_from_json(const nlohmann::json& j);
void save_manifest(const DatasetManifest& m, const std::filesystem::path& path);
DatasetManifest load_manifest(const std::filesystem::path& path);

// Per-scene seed derived from the master seed (splitmix64 mix).
std::uint64_t scene_seed(std::uint64_t master_seed, std::uint64_t index);

class DatasetError : public std::runtime_error {
 public:
  DatasetError(std::string sample_id, const std::string& message)
      : std::runtime_error("sample '" + sample_id + "': " + message), id_(std::move(sample_id)) {}
  const std::string& sample_id() const { return id_; }

 private:
  std::string id_;
};

// Renders one scene into a complete sample (inputs at every configured
// frequency plus mirror-trick ground truth at 20 MHz), rounded to storage
// precision.
SampleRecord make_sample(const SceneDescription& scene, const DatasetConfig& cfg,
                         const std::string& id);

// Writes out_dir/samples/*.bin and out_dir/manifest.json. Deterministic in
// (n_scenes, master_seed, cfg).
DatasetManifest generate_dataset(std::size_t n_scenes, std::uint64_t master_seed,
                                 const DatasetConfig& cfg, const std::filesystem::path& out_dir);

class SplitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Splits by scene so that no (object kind, pose on a 1 cm / 1 degree grid)
// appears on both sides. Throws SplitError when that is impossible with the
// requested sizes.
std::pair<DatasetManifest, DatasetManifest> split_dataset(const DatasetManifest& manifest,
                                                          double ratio);

// Nearest-rank percentile of the 20 MHz amplitudes of the given samples.
double normalization_constant(const std::vector<SampleRecord>& samples, double percentile);

inline constexpr std::size_t kNetworkChannels = 7;

// Channels: [A20/K, Re20/A20, Re50/A20, Re60/A20, Im20/A20, Im50/A20, Im60/A20].
struct NetworkInput {
  std::array<Image<double>, kNetworkChannels> channels;

  std::uint32_t width() const { return channels[0].width(); }
  std::uint32_t height() const { return channels[0].height(); }
  bool operator==(const NetworkInput&) const = default;
};

// Throws std::invalid_argument for K <= 0 or missing 20/50/60 MHz inputs.
NetworkInput preprocess(const SampleRecord& sample, double k);

void write_network_input(const NetworkInput& x, const std::filesystem::path& path);
NetworkInput parse_network_input(const std::filesystem::path& path);

struct AugmentParams {
  double rotation_deg = 0.0;   // [-180, 180], counter-clockwise on screen
  double translate_x = 0.0;    // pixels, |.| <= 0.2 * width
  double translate_y = 0.0;    // pixels, |.| <= 0.2 * height
  bool flip_h = false;
  bool flip_v = false;
  double noise_sigma = 0.0;    // additive Gaussian noise on input channels
};

inline constexpr double kDefaultNoiseSigma = 0.02;
inline constexpr double kHeavyNoiseSigma = 1.0;

AugmentParams random_augment_params(std::uint64_t seed, std::uint32_t width,
                                    std::uint32_t height, double noise_sigma);

struct AugmentTarget {
  tof::PhasorImage gt_phasor;
  DepthMap gt_depth;
  SegMask gt_mask;
};

struct AugmentedPair {
  NetworkInput input;
  AugmentTarget target;
};

// Same geometric transform on input and targets: bilinear for continuous
// planes, nearest for the mask, depth averaged over object neighbours only so
// that mask == (depth > 0) survives. Out-of-frame pixels become background.
AugmentedPair augment(const NetworkInput& x, const AugmentTarget& gt, const AugmentParams& p,
                      std::uint64_t seed);

}  // namespace night
