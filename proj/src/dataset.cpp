#include "night/dataset.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <tuple>

#include "night/scene_io.hpp"

namespace night {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration

namespace {

void reject_unknown_keys(const json& j, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ConfigError(where + ": unknown key '" + key + "'");
    }
  }
}

Range range_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2) throw ConfigError(where + ": expected [lo, hi]");
  Range r{j[0].get<double>(), j[1].get<double>()};
  if (r.lo > r.hi) throw ConfigError(where + ": empty range");
  return r;
}

}  // namespace

DatasetConfig dataset_config_from_json(const json& j) {
  try {
    reject_unknown_keys(j,
                        {"width", "height", "frequencies_hz", "bins", "render", "sampling",
                         "train_ratio", "normalization_percentile", "n_scenes", "noise_sigma"},
                        "config");
    DatasetConfig cfg;
    cfg.render.width = j.value("width", 0u);
    cfg.render.height = j.value("height", 0u);
    if (j.contains("frequencies_hz")) {
      cfg.frequencies_hz = j["frequencies_hz"].get<std::vector<double>>();
    }
    if (j.contains("bins")) {
      const json& b = j["bins"];
      reject_unknown_keys(b, {"count", "size_m"}, "config.bins");
      cfg.render.bins.n_bins = b.value("count", cfg.render.bins.n_bins);
      cfg.render.bins.bin_size_m = b.value("size_m", cfg.render.bins.bin_size_m);
    }
    if (j.contains("render")) {
      const json& r = j["render"];
      reject_unknown_keys(r, {"wall_patches", "object_samples", "emitter_power"}, "config.render");
      if (r.contains("wall_patches")) {
        const auto g = r["wall_patches"].get<std::vector<std::uint32_t>>();
        if (g.size() != 2) throw ConfigError("config.render.wall_patches: expected [u, v]");
        cfg.render.wall_patches_u = g[0];
        cfg.render.wall_patches_v = g[1];
      }
      cfg.render.object_samples = r.value("object_samples", cfg.render.object_samples);
      cfg.render.emitter_power = r.value("emitter_power", cfg.render.emitter_power);
    }
    if (j.contains("sampling")) {
      const json& s = j["sampling"];
      reject_unknown_keys(s,
                          {"x", "y", "z", "rotation_deg", "roughness_min", "roughness_step",
                           "roughness_steps", "composite_probability", "max_bounding_volume",
                           "clearance"},
                          "config.sampling");
      SamplingConfig& sc = cfg.sampling;
      if (s.contains("x")) sc.x = range_from_json(s["x"], "config.sampling.x");
      if (s.contains("y")) sc.y = range_from_json(s["y"], "config.sampling.y");
      if (s.contains("z")) sc.z = range_from_json(s["z"], "config.sampling.z");
      if (s.contains("rotation_deg")) {
        sc.rotation_deg = range_from_json(s["rotation_deg"], "config.sampling.rotation_deg");
      }
      sc.roughness_min = s.value("roughness_min", sc.roughness_min);
      sc.roughness_step = s.value("roughness_step", sc.roughness_step);
      sc.roughness_steps = s.value("roughness_steps", sc.roughness_steps);
      sc.composite_probability = s.value("composite_probability", sc.composite_probability);
      sc.max_bounding_volume = s.value("max_bounding_volume", sc.max_bounding_volume);
      sc.clearance = s.value("clearance", sc.clearance);
    }
    cfg.train_ratio = j.value("train_ratio", cfg.train_ratio);
    cfg.normalization_percentile = j.value("normalization_percentile", cfg.normalization_percentile);
    cfg.n_scenes = j.value("n_scenes", cfg.n_scenes);
    cfg.noise_sigma = j.value("noise_sigma", cfg.noise_sigma);
    if (cfg.n_scenes == 0) throw ConfigError("config: n_scenes must be >= 1");
    if (cfg.noise_sigma < 0.0) throw ConfigError("config: noise_sigma must be >= 0");

    if (cfg.frequencies_hz.empty()) throw ConfigError("config: no frequencies");
    for (double f : cfg.frequencies_hz) {
      if (!(f > 0.0)) throw ConfigError("config: frequencies must be positive");
    }
    if (!(cfg.train_ratio > 0.0 && cfg.train_ratio < 1.0)) {
      throw ConfigError("config: train_ratio must be in (0, 1)");
    }
    if (cfg.render.wall_patches_u == 0 || cfg.render.wall_patches_v == 0 ||
        cfg.render.object_samples == 0 || cfg.render.bins.n_bins == 0 ||
        !(cfg.render.bins.bin_size_m > 0.0)) {
      throw ConfigError("config: render grid, samples and bins must be positive");
    }
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

json to_json(const DatasetConfig& cfg) {
  const SamplingConfig& s = cfg.sampling;
  return {{"width", cfg.render.width},
          {"height", cfg.render.height},
          {"frequencies_hz", cfg.frequencies_hz},
          {"bins", {{"count", cfg.render.bins.n_bins}, {"size_m", cfg.render.bins.bin_size_m}}},
          {"render",
           {{"wall_patches", {cfg.render.wall_patches_u, cfg.render.wall_patches_v}},
            {"object_samples", cfg.render.object_samples},
            {"emitter_power", cfg.render.emitter_power}}},
          {"sampling",
           {{"x", {s.x.lo, s.x.hi}},
            {"y", {s.y.lo, s.y.hi}},
            {"z", {s.z.lo, s.z.hi}},
            {"rotation_deg", {s.rotation_deg.lo, s.rotation_deg.hi}},
            {"roughness_min", s.roughness_min},
            {"roughness_step", s.roughness_step},
            {"roughness_steps", s.roughness_steps},
            {"composite_probability", s.composite_probability},
            {"max_bounding_volume", s.max_bounding_volume},
            {"clearance", s.clearance}}},
          {"train_ratio", cfg.train_ratio},
          {"normalization_percentile", cfg.normalization_percentile},
          {"n_scenes", cfg.n_scenes},
          {"noise_sigma", cfg.noise_sigma}};
}

DatasetConfig load_dataset_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
  return dataset_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Manifest

namespace {

json meta_to_json(const SampleMeta& m) {
  json objects = json::array();
  std::vector<std::string> kinds;
  for (const ObjectMeta& o : m.objects) {
    kinds.emplace_back(to_string(o.kind));
    objects.push_back({{"kind", to_string(o.kind)},
                       {"position", vec3_to_json(o.pose.position)},
                       {"rotation_deg", vec3_to_json(o.pose.rotation_deg)}});
  }
  return {{"scene_seed", m.scene_seed},
          {"kinds", kinds},
          {"objects", objects},
          {"roughness", m.roughness},
          {"split", m.split}};
}

SampleMeta meta_from_json(const json& j) {
  SampleMeta m;
  m.scene_seed = j.at("scene_seed").get<std::uint64_t>();
  m.roughness = j.at("roughness").get<double>();
  m.split = j.value("split", "");
  for (const json& o : j.at("objects")) {
    ObjectMeta om;
    om.kind = primitive_kind_from_string(o.at("kind").get<std::string>());
    om.pose.position = vec3_from_json(o.at("position"));
    om.pose.rotation_deg = vec3_from_json(o.at("rotation_deg"));
    m.objects.push_back(om);
  }
  return m;
}

}  // namespace

json to_json(const DatasetManifest& m) {
  json samples = json::array();
  for (const ManifestEntry& e : m.samples) {
    samples.push_back({{"id", e.id}, {"file", e.file}, {"split", e.meta.split}, {"meta", meta_to_json(e.meta)}});
  }
  return {{"format_version", m.format_version},
          {"frequencies_hz", m.frequencies_hz},
          {"width", m.width},
          {"height", m.height},
          {"bins", {{"count", m.bins.n_bins}, {"size_m", m.bins.bin_size_m}}},
          {"normalization_k", m.normalization_k},
          {"master_seed", m.master_seed},
          {"samples", samples}};
}

DatasetManifest manifest_from_json(const json& j) {
  try {
    DatasetManifest m;
    m.format_version = j.at("format_version").get<int>();
    if (m.format_version != DatasetManifest::kFormatVersion) {
      throw ConfigError("manifest: unsupported format_version " + std::to_string(m.format_version));
    }
    m.frequencies_hz = j.at("frequencies_hz").get<std::vector<double>>();
    m.width = j.at("width").get<std::uint32_t>();
    m.height = j.at("height").get<std::uint32_t>();
    m.bins.n_bins = j.at("bins").at("count").get<std::size_t>();
    m.bins.bin_size_m = j.at("bins").at("size_m").get<double>();
    m.normalization_k = j.at("normalization_k").get<double>();
    m.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const json& s : j.at("samples")) {
      ManifestEntry e;
      e.id = s.at("id").get<std::string>();
      e.file = s.at("file").get<std::string>();
      e.meta = meta_from_json(s.at("meta"));
      e.meta.split = s.value("split", e.meta.split);
      m.samples.push_back(std::move(e));
    }
    return m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

void save_manifest(const DatasetManifest& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SampleIoError("cannot write manifest '" + path.string() + "'");
  out << to_json(m).dump(2) << '\n';
  if (!out) throw SampleIoError("failed writing manifest '" + path.string() + "'");
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SampleIoError("cannot open manifest '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("manifest '" + path.string() + "': " + e.what());
  }
  return manifest_from_json(j);
}

// ---------------------------------------------------------------------------
// Generation

std::uint64_t scene_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

SampleRecord make_sample(const SceneDescription& scene, const DatasetConfig& cfg,
                         const std::string& id) {
  SampleRecord rec;
  rec.id = id;
  rec.inputs = render::render_itof_nlos(scene, cfg.render, cfg.frequencies_hz);
  const render::LosGroundTruth gt = render::render_los_gt(
      mirror_transform(scene), tof::ModulationFrequency(tof::kGroundTruthFrequencyHz), cfg.render);
  rec.gt_phasor = gt.phasor;
  rec.gt_depth = gt.depth;
  rec.gt_mask = gt.mask;
  rec.meta.roughness = scene.wall_roughness();
  for (const Primitive& p : scene.objects) rec.meta.objects.push_back({p.kind, p.pose});
  quantize_to_storage(rec);
  return rec;
}

namespace {

std::size_t find_frequency(const std::vector<tof::PhasorImage>& inputs, double hz) {
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    if (inputs[i].frequency_hz == hz) return i;
  }
  return inputs.size();
}

}  // namespace

double normalization_constant(const std::vector<SampleRecord>& samples, double percentile) {
  std::vector<double> amplitudes;
  for (const SampleRecord& s : samples) {
    const std::size_t f = find_frequency(s.inputs, tof::kGroundTruthFrequencyHz);
    if (f == s.inputs.size()) continue;
    const auto& p = s.inputs[f];
    for (std::size_t i = 0; i < p.re.size(); ++i) amplitudes.push_back(std::hypot(p.re[i], p.im[i]));
  }
  if (amplitudes.empty()) return 1.0;
  const double q = std::clamp(percentile, 0.0, 100.0) / 100.0;
  std::size_t rank = std::size_t(std::ceil(q * double(amplitudes.size())));
  rank = std::clamp<std::size_t>(rank, 1, amplitudes.size()) - 1;
  std::nth_element(amplitudes.begin(), amplitudes.begin() + std::ptrdiff_t(rank), amplitudes.end());
  const double k = amplitudes[rank];
  return k > 0.0 ? k : 1.0;
}

DatasetManifest generate_dataset(std::size_t n_scenes, std::uint64_t master_seed,
                                 const DatasetConfig& cfg, const std::filesystem::path& out_dir) {
  if (n_scenes == 0) throw std::invalid_argument("generate_dataset: n_scenes must be >= 1");
  std::error_code ec;
  std::filesystem::create_directories(out_dir / "samples", ec);
  if (ec) throw SampleIoError("cannot create '" + (out_dir / "samples").string() + "': " + ec.message());

  DatasetManifest manifest;
  manifest.frequencies_hz = cfg.frequencies_hz;
  manifest.bins = cfg.render.bins;
  manifest.master_seed = master_seed;

  std::vector<SampleRecord> records;
  records.reserve(n_scenes);
  for (std::size_t i = 0; i < n_scenes; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "scene_%06zu", i);
    const std::uint64_t seed = scene_seed(master_seed, i);
    SampleRecord rec;
    try {
      rec = make_sample(sample_scene(seed, cfg.sampling), cfg, id);
    } catch (const std::exception& e) {
      throw DatasetError(id, e.what());
    }
    rec.meta.scene_seed = seed;
    manifest.width = rec.width();
    manifest.height = rec.height();
    manifest.samples.push_back({id, std::string("samples/") + id + ".bin", rec.meta});
    records.push_back(std::move(rec));
  }

  const auto [train, test] = split_dataset(manifest, cfg.train_ratio);
  std::set<std::string> train_ids;
  for (const ManifestEntry& e : train.samples) train_ids.insert(e.id);
  std::vector<SampleRecord> train_records;
  for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
    const bool is_train = train_ids.count(manifest.samples[i].id) != 0;
    manifest.samples[i].meta.split = is_train ? "train" : "test";
    records[i].meta.split = manifest.samples[i].meta.split;
    if (is_train) train_records.push_back(records[i]);
  }
  manifest.normalization_k = normalization_constant(train_records, cfg.normalization_percentile);

  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      write_sample(records[i], out_dir / manifest.samples[i].file);
    } catch (const SampleIoError& e) {
      throw SampleIoError("sample '" + records[i].id + "': " + e.what());
    }
  }
  save_manifest(manifest, out_dir / "manifest.json");
  return manifest;
}

// ---------------------------------------------------------------------------
// Split

namespace {

using PoseKey = std::tuple<int, long, long, long, long, long, long>;

PoseKey pose_key(const ObjectMeta& o) {
  auto cm = [](double m) { return std::lround(m * 100.0); };
  auto deg = [](double d) { return std::lround(d); };
  return {int(o.kind),
          cm(o.pose.position.x),
          cm(o.pose.position.y),
          cm(o.pose.position.z),
          deg(o.pose.rotation_deg.x),
          deg(o.pose.rotation_deg.y),
          deg(o.pose.rotation_deg.z)};
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

std::pair<DatasetManifest, DatasetManifest> split_dataset(const DatasetManifest& manifest,
                                                          double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw std::invalid_argument("split_dataset: ratio must be in (0, 1)");
  const std::size_t n = manifest.samples.size();
  const auto n_train = std::size_t(std::llround(ratio * double(n)));

  // Scenes sharing any object pose must land on the same side.
  DisjointSets sets(n);
  std::map<PoseKey, std::size_t> first_owner;
  for (std::size_t i = 0; i < n; ++i) {
    for (const ObjectMeta& o : manifest.samples[i].meta.objects) {
      const auto [it, inserted] = first_owner.emplace(pose_key(o), i);
      if (!inserted) sets.unite(i, it->second);
    }
  }
  std::map<std::size_t, std::vector<std::size_t>> groups;  // keyed by smallest member
  for (std::size_t i = 0; i < n; ++i) groups[sets.find(i)].push_back(i);

  std::vector<bool> is_train(n, false);
  std::size_t count = 0;
  for (const auto& [root, members] : groups) {
    if (count + members.size() <= n_train) {
      for (std::size_t i : members) is_train[i] = true;
      count += members.size();
    }
  }
  if (count != n_train) {
    throw SplitError("split_dataset: cannot reach " + std::to_string(n_train) +
                     " training scenes without sharing an object pose across splits");
  }

  DatasetManifest train = manifest;
  DatasetManifest test = manifest;
  train.samples.clear();
  test.samples.clear();
  for (std::size_t i = 0; i < n; ++i) {
    ManifestEntry e = manifest.samples[i];
    e.meta.split = is_train[i] ? "train" : "test";
    (is_train[i] ? train : test).samples.push_back(std::move(e));
  }

  std::set<PoseKey> train_keys;
  for (const ManifestEntry& e : train.samples)
    for (const ObjectMeta& o : e.meta.objects) train_keys.insert(pose_key(o));
  for (const ManifestEntry& e : test.samples)
    for (const ObjectMeta& o : e.meta.objects)
      if (train_keys.count(pose_key(o))) throw SplitError("split_dataset: pose collision after split");
  return {std::move(train), std::move(test)};
}

// ---------------------------------------------------------------------------
// Network input

NetworkInput preprocess(const SampleRecord& sample, double k) {
  if (!(k > 0.0)) throw std::invalid_argument("preprocess: normalization constant must be > 0");
  const std::size_t i20 = find_frequency(sample.inputs, 2.0e7);
  const std::size_t i50 = find_frequency(sample.inputs, 5.0e7);
  const std::size_t i60 = find_frequency(sample.inputs, 6.0e7);
  if (i20 == sample.inputs.size() || i50 == sample.inputs.size() || i60 == sample.inputs.size()) {
    throw std::invalid_argument("preprocess: sample needs 20, 50 and 60 MHz inputs");
  }
  const auto& p20 = sample.inputs[i20];
  const auto& p50 = sample.inputs[i50];
  const auto& p60 = sample.inputs[i60];
  const std::uint32_t w = p20.width();
  const std::uint32_t h = p20.height();

  NetworkInput x;
  for (auto& c : x.channels) c = Image<double>(w, h);
  for (std::size_t i = 0; i < std::size_t(w) * h; ++i) {
    const double a = std::hypot(p20.re[i], p20.im[i]);
    if (a == 0.0) continue;
    x.channels[0][i] = std::min(1.0, a / k);
    x.channels[1][i] = p20.re[i] / a;
    x.channels[2][i] = p50.re[i] / a;
    x.channels[3][i] = p60.re[i] / a;
    x.channels[4][i] = p20.im[i] / a;
    x.channels[5][i] = p50.im[i] / a;
    x.channels[6][i] = p60.im[i] / a;
  }
  return x;
}

namespace {

constexpr char kInputMagic[4] = {'N', 'L', 'I', 'N'};
constexpr std::uint32_t kInputVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}

std::uint32_t get_u32(const std::vector<std::uint8_t>& in, std::size_t& pos) {
  if (in.size() - pos < 4) throw SampleFormatError(SampleFormatError::Kind::truncated, "network_input", "network input truncated");
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= std::uint32_t(in[pos + i]) << (8 * i);
  pos += 4;
  return v;
}

}  // namespace

void write_network_input(const NetworkInput& x, const std::filesystem::path& path) {
  std::vector<std::uint8_t> bytes(kInputMagic, kInputMagic + 4);
  put_u32(bytes, kInputVersion);
  put_u32(bytes, kNetworkChannels);
  put_u32(bytes, x.height());
  put_u32(bytes, x.width());
  for (const auto& c : x.channels)
    for (double v : c.data()) put_u32(bytes, std::bit_cast<std::uint32_t>(float(v)));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw SampleIoError("cannot open '" + path.string() + "' for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!out) throw SampleIoError("failed writing '" + path.string() + "'");
}

NetworkInput parse_network_input(const std::filesystem::path& path) {
  using Kind = SampleFormatError::Kind;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw SampleIoError("cannot open '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kInputMagic, 4) != 0) {
    throw SampleFormatError(Kind::bad_magic, "magic", "not a network input file");
  }
  std::size_t pos = 4;
  if (get_u32(bytes, pos) != kInputVersion) throw SampleFormatError(Kind::bad_version, "header", "unsupported network input version");
  if (get_u32(bytes, pos) != kNetworkChannels) throw SampleFormatError(Kind::bad_header, "header", "unexpected channel count");
  const std::uint32_t h = get_u32(bytes, pos);
  const std::uint32_t w = get_u32(bytes, pos);
  NetworkInput x;
  for (auto& c : x.channels) {
    c = Image<double>(w, h);
    for (auto& v : c.data()) v = double(std::bit_cast<float>(get_u32(bytes, pos)));
  }
  if (pos != bytes.size()) throw SampleFormatError(Kind::trailing_data, "end", "trailing bytes in network input");
  return x;
}

// ---------------------------------------------------------------------------
// Augmentation

AugmentParams random_augment_params(std::uint64_t seed, std::uint32_t width,
                                    std::uint32_t height, double noise_sigma) {
  std::mt19937_64 rng(seed);
  AugmentParams p;
  p.rotation_deg = std::uniform_real_distribution<double>(-180.0, 180.0)(rng);
  p.translate_x = std::uniform_real_distribution<double>(-0.2 * width, 0.2 * width)(rng);
  p.translate_y = std::uniform_real_distribution<double>(-0.2 * height, 0.2 * height)(rng);
  p.flip_h = std::bernoulli_distribution(0.5)(rng);
  p.flip_v = std::bernoulli_distribution(0.5)(rng);
  p.noise_sigma = noise_sigma;
  return p;
}

namespace {

struct InverseMap {
  double cx, cy, c, s, tx, ty;
  bool flip_h, flip_v;
  std::uint32_t w, h;

  // Output pixel -> source coordinates.
  void operator()(std::uint32_t x, std::uint32_t y, double& sx, double& sy) const {
    const double px = double(x) - tx - cx;
    const double py = double(y) - ty - cy;
    // Rot(-theta) applied to (px, py); forward rotation is [c s; -s c].
    double ux = cx + (c * px - s * py);
    double uy = cy + (s * px + c * py);
    if (flip_h) ux = double(w - 1) - ux;
    if (flip_v) uy = double(h - 1) - uy;
    sx = ux;
    sy = uy;
  }
};

InverseMap make_inverse_map(const AugmentParams& p, std::uint32_t w, std::uint32_t h) {
  InverseMap m{};
  m.cx = 0.5 * double(w - 1);
  m.cy = 0.5 * double(h - 1);
  const double turns = p.rotation_deg / 90.0;
  if (turns == std::round(turns)) {
    // Exact cos/sin for quarter turns keep resampling on the pixel grid.
    const int q = ((int(std::lround(turns)) % 4) + 4) % 4;
    constexpr int kCos[4] = {1, 0, -1, 0};
    constexpr int kSin[4] = {0, 1, 0, -1};
    m.c = kCos[q];
    m.s = kSin[q];
  } else {
    const double a = deg_to_rad(p.rotation_deg);
    m.c = std::cos(a);
    m.s = std::sin(a);
  }
  m.tx = p.translate_x;
  m.ty = p.translate_y;
  m.flip_h = p.flip_h;
  m.flip_v = p.flip_v;
  m.w = w;
  m.h = h;
  return m;
}

constexpr double kGridTol = 1e-9;

bool in_frame(double sx, double sy, std::uint32_t w, std::uint32_t h) {
  return sx >= -kGridTol && sy >= -kGridTol && sx <= double(w - 1) + kGridTol &&
         sy <= double(h - 1) + kGridTol;
}

struct Footprint {
  std::uint32_t x0, y0, x1, y1;
  double fx, fy;
  bool exact;
};

Footprint footprint(double sx, double sy, std::uint32_t w, std::uint32_t h) {
  sx = std::clamp(sx, 0.0, double(w - 1));
  sy = std::clamp(sy, 0.0, double(h - 1));
  Footprint f{};
  const double rx = std::round(sx);
  const double ry = std::round(sy);
  if (std::abs(sx - rx) <= kGridTol && std::abs(sy - ry) <= kGridTol) {
    f.x0 = f.x1 = std::uint32_t(rx);
    f.y0 = f.y1 = std::uint32_t(ry);
    f.exact = true;
    return f;
  }
  f.x0 = std::uint32_t(std::floor(sx));
  f.y0 = std::uint32_t(std::floor(sy));
  f.x1 = std::min(f.x0 + 1, w - 1);
  f.y1 = std::min(f.y0 + 1, h - 1);
  f.fx = sx - f.x0;
  f.fy = sy - f.y0;
  f.exact = false;
  return f;
}

double bilinear(const Image<double>& img, const Footprint& f) {
  if (f.exact) return img.at(f.x0, f.y0);
  return (1 - f.fx) * (1 - f.fy) * img.at(f.x0, f.y0) + f.fx * (1 - f.fy) * img.at(f.x1, f.y0) +
         (1 - f.fx) * f.fy * img.at(f.x0, f.y1) + f.fx * f.fy * img.at(f.x1, f.y1);
}

}  // namespace

AugmentedPair augment(const NetworkInput& x, const AugmentTarget& gt, const AugmentParams& p,
                      std::uint64_t seed) {
  const std::uint32_t w = x.width();
  const std::uint32_t h = x.height();
  if (!gt.gt_depth.same_shape(w, h) || !gt.gt_mask.same_shape(w, h) ||
      !gt.gt_phasor.re.same_shape(w, h)) {
    throw std::invalid_argument("augment: input and target sizes differ");
  }
  if (p.rotation_deg < -180.0 || p.rotation_deg > 180.0 || std::abs(p.translate_x) > 0.2 * w ||
      std::abs(p.translate_y) > 0.2 * h || p.noise_sigma < 0.0) {
    throw std::invalid_argument("augment: parameters out of range");
  }
  const InverseMap inv = make_inverse_map(p, w, h);

  AugmentedPair out;
  for (auto& c : out.input.channels) c = Image<double>(w, h);
  out.target.gt_phasor = tof::PhasorImage(gt.gt_phasor.frequency_hz, w, h);
  out.target.gt_depth = DepthMap(w, h);
  out.target.gt_mask = SegMask(w, h);

  for (std::uint32_t y = 0; y < h; ++y) {
    for (std::uint32_t xo = 0; xo < w; ++xo) {
      double sx, sy;
      inv(xo, y, sx, sy);
      if (!in_frame(sx, sy, w, h)) continue;
      const Footprint f = footprint(sx, sy, w, h);
      for (std::size_t c = 0; c < kNetworkChannels; ++c) {
        out.input.channels[c].at(xo, y) = bilinear(x.channels[c], f);
      }
      out.target.gt_phasor.re.at(xo, y) = bilinear(gt.gt_phasor.re, f);
      out.target.gt_phasor.im.at(xo, y) = bilinear(gt.gt_phasor.im, f);

      const auto nx = std::uint32_t(std::lround(std::clamp(sx, 0.0, double(w - 1))));
      const auto ny = std::uint32_t(std::lround(std::clamp(sy, 0.0, double(h - 1))));
      if (!gt.gt_mask.at(nx, ny)) continue;
      out.target.gt_mask.at(xo, y) = 1;
      if (f.exact) {
        out.target.gt_depth.at(xo, y) = gt.gt_depth.at(f.x0, f.y0);
        continue;
      }
      // Average over object corners only; the nearest corner is one of them.
      const double wts[4] = {(1 - f.fx) * (1 - f.fy), f.fx * (1 - f.fy), (1 - f.fx) * f.fy, f.fx * f.fy};
      const std::uint32_t xs[4] = {f.x0, f.x1, f.x0, f.x1};
      const std::uint32_t ys[4] = {f.y0, f.y0, f.y1, f.y1};
      double acc = 0.0, wsum = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (gt.gt_mask.at(xs[k], ys[k])) {
          acc += wts[k] * gt.gt_depth.at(xs[k], ys[k]);
          wsum += wts[k];
        }
      }
      out.target.gt_depth.at(xo, y) = wsum > 0.0 ? acc / wsum : gt.gt_depth.at(nx, ny);
    }
  }

  if (p.noise_sigma > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, p.noise_sigma);
    for (auto& c : out.input.channels)
      for (auto& v : c.data()) v += noise(rng);
  }
  return out;
}

}  // namespace night
