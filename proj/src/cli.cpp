#include "night/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "night/dataset.hpp"
#include "night/metrics.hpp"
#include "night/png_io.hpp"
#include "night/render.hpp"
#include "night/sample_io.hpp"
#include "night/scene_io.hpp"
#include "night/tof.hpp"

namespace night::cli {

namespace fs = std::filesystem;

namespace {

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw SampleIoError("cannot create '" + dir.string() + "': " + ec.message());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw SampleIoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw SampleIoError("failed writing '" + path.string() + "'");
}

const tof::PhasorImage& input_at(const SampleRecord& s, double hz) {
  for (const auto& p : s.inputs) {
    if (p.frequency_hz == hz) return p;
  }
  throw ValidationError("sample '" + s.id + "' has no " + std::to_string(hz) + " Hz input");
}

// --- generate ---------------------------------------------------------------

struct GenerateArgs {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  std::size_t n = 0;
};

int run_generate(const GenerateArgs& a, std::ostream& out) {
  const DatasetConfig cfg = a.config.empty() ? DatasetConfig{} : load_dataset_config(a.config);
  const std::size_t n = a.n > 0 ? a.n : cfg.n_scenes;
  const DatasetManifest m = generate_dataset(n, a.seed, cfg, a.out);
  std::size_t n_train = 0;
  for (const auto& e : m.samples) n_train += e.meta.split == "train";
  out << "generated " << m.samples.size() << " samples (" << n_train << " train, "
      << m.samples.size() - n_train << " test) in " << a.out << '\n';
  return kExitOk;
}

// --- render -----------------------------------------------------------------

struct RenderArgs {
  std::string scene;
  std::string config;
  std::string out;
  std::string id;
};

int run_render(const RenderArgs& a, std::ostream& out) {
  const DatasetConfig cfg = a.config.empty() ? DatasetConfig{} : load_dataset_config(a.config);
  SceneDescription scene;
  try {
    scene = load_scene(a.scene);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const std::string id = a.id.empty() ? fs::path(a.out).stem().string() : a.id;
  SampleRecord rec;
  try {
    rec = make_sample(scene, cfg, id);
  } catch (const render::NlosViolation& e) {
    throw ValidationError(e.what());
  }
  if (fs::path(a.out).has_parent_path()) ensure_dir(fs::path(a.out).parent_path());
  write_sample(rec, a.out);
  out << "rendered " << a.scene << " -> " << a.out << " (" << rec.width() << "x" << rec.height()
      << ")\n";
  return kExitOk;
}

// --- preprocess -------------------------------------------------------------

struct PreprocessArgs {
  std::string manifest;
  std::string out;
  std::size_t augment_copies = 0;
  std::uint64_t seed = 0;
  std::string config;
  std::optional<double> noise_sigma;
  bool heavy_noise = false;
};

int run_preprocess(const PreprocessArgs& a, std::ostream& out) {
  const DatasetManifest m = load_manifest(a.manifest);
  const fs::path root = fs::path(a.manifest).parent_path();
  ensure_dir(a.out);
  const double config_sigma =
      a.config.empty() ? kDefaultNoiseSigma : load_dataset_config(a.config).noise_sigma;
  const double sigma = a.heavy_noise ? kHeavyNoiseSigma : a.noise_sigma.value_or(config_sigma);
  std::size_t written = 0;
  for (std::size_t i = 0; i < m.samples.size(); ++i) {
    const ManifestEntry& e = m.samples[i];
    const SampleRecord s = parse_sample(root / e.file);
    const NetworkInput x = preprocess(s, m.normalization_k);
    write_network_input(x, fs::path(a.out) / (e.id + ".nlin"));
    ++written;
    if (e.meta.split != "train") continue;
    const AugmentTarget gt{s.gt_phasor, s.gt_depth, s.gt_mask};
    for (std::size_t k = 0; k < a.augment_copies; ++k) {
      const std::uint64_t seed = scene_seed(scene_seed(a.seed, i), k);
      const AugmentParams p = random_augment_params(seed, x.width(), x.height(), sigma);
      const AugmentedPair aug = augment(x, gt, p, seed ^ 0xA5A5A5A5A5A5A5A5ull);
      char suffix[32];
      std::snprintf(suffix, sizeof suffix, "_aug%03zu", k);
      write_network_input(aug.input, fs::path(a.out) / (e.id + suffix + ".nlin"));
      SampleRecord target;
      target.id = e.id + suffix;
      target.gt_phasor = aug.target.gt_phasor;
      target.gt_depth = aug.target.gt_depth;
      target.gt_mask = aug.target.gt_mask;
      quantize_to_storage(target);
      write_sample(target, fs::path(a.out) / (e.id + suffix + ".bin"));
      ++written;
    }
  }
  out << "wrote " << written << " network inputs to " << a.out << " (K = " << m.normalization_k
      << ")\n";
  return kExitOk;
}

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gt;
  std::string report;
  std::string split;
  double alpha = 1.0 / 7.0;
  double threshold = 0.01;
};

int run_eval(const EvalArgs& a, std::ostream& out) {
  metrics::LossConfig cfg;
  cfg.alpha = a.alpha;
  cfg.depth_threshold = a.threshold;
  if (!(cfg.alpha > 0.0) || !(cfg.depth_threshold > 0.0)) {
    throw ConfigError("alpha and threshold must be > 0");
  }
  metrics::EvalReport r;
  try {
    r = metrics::evaluate_dataset(a.pred, a.gt, cfg, a.split);
  } catch (const metrics::MissingPrediction& e) {
    throw SampleIoError(e.what());
  }
  if (r.per_sample.empty()) throw ValidationError("no samples to evaluate");
  if (fs::path(a.report).has_parent_path()) ensure_dir(fs::path(a.report).parent_path());
  write_text(a.report, metrics::to_json(r).dump(2) + "\n");
  out << std::setprecision(6) << "samples " << r.per_sample.size() << "  MAE " << r.mae.mean
      << " cm  mIoU " << r.miou.mean << '\n';
  return kExitOk;
}

// --- baseline ---------------------------------------------------------------

struct BaselineArgs {
  std::string gt;
  std::string out;
};

int run_baseline(const BaselineArgs& a, std::ostream& out) {
  const DatasetManifest m = load_manifest(a.gt);
  const fs::path root = fs::path(a.gt).parent_path();
  ensure_dir(a.out);
  for (const ManifestEntry& e : m.samples) {
    const SampleRecord s = parse_sample(root / e.file);
    SampleRecord pred;
    pred.id = s.id;
    pred.gt_phasor = input_at(s, tof::kGroundTruthFrequencyHz);
    pred.gt_depth = tof::naive_depth(pred.gt_phasor);
    pred.gt_mask = metrics::hard_threshold(pred.gt_depth, metrics::LossConfig{}.depth_threshold);
    for (std::size_t i = 0; i < pred.gt_depth.size(); ++i) {
      if (!pred.gt_mask[i]) pred.gt_depth[i] = 0.0;
    }
    quantize_to_storage(pred);
    write_sample(pred, fs::path(a.out) / fs::path(e.file).filename());
  }
  out << "wrote " << m.samples.size() << " baseline predictions to " << a.out << '\n';
  return kExitOk;
}

// --- export-pointcloud ------------------------------------------------------

struct PointcloudArgs {
  std::string sample;
  std::string out;
  std::string source = "gt";
};

DepthMap depth_for(const SampleRecord& s, const std::string& source) {
  if (source == "gt") return s.gt_depth;
  if (source == "phasor") return tof::naive_depth(s.gt_phasor);
  if (source == "input") return tof::naive_depth(input_at(s, tof::kGroundTruthFrequencyHz));
  throw ConfigError("unknown depth source '" + source + "'");
}

int run_pointcloud(const PointcloudArgs& a, std::ostream& out) {
  const SampleRecord s = parse_sample(a.sample);
  const DepthMap depth = depth_for(s, a.source);
  Camera cam;
  cam.intrinsics.width = s.width();
  cam.intrinsics.height = s.height();
  std::ostringstream text;
  text << std::setprecision(9);
  std::size_t n = 0;
  for (std::uint32_t y = 0; y < depth.height(); ++y) {
    for (std::uint32_t x = 0; x < depth.width(); ++x) {
      const double d = depth.at(x, y);
      if (!(d > 0.0)) continue;
      const Vec3 p = camera_ray(cam, x, y).at(d);
      text << p.x << ' ' << p.y << ' ' << p.z << '\n';
      ++n;
    }
  }
  if (fs::path(a.out).has_parent_path()) ensure_dir(fs::path(a.out).parent_path());
  write_text(a.out, text.str());
  out << "wrote " << n << " points to " << a.out << '\n';
  return kExitOk;
}

// --- plot -------------------------------------------------------------------

struct PlotArgs {
  std::string sample;
  std::string out;
};

int run_plot(const PlotArgs& a, std::ostream& out) {
  const SampleRecord s = parse_sample(a.sample);
  ensure_dir(a.out);
  const fs::path dir(a.out);
  try {
    write_depth_png(s.gt_depth, dir / "gt_depth.png");
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
  Image<double> mask(s.width(), s.height());
  for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = s.gt_mask[i];
  write_plane_png(mask, 0.0, 1.0, dir / "gt_mask.png");

  auto symmetric_plot = [&](const Image<double>& re, const Image<double>& im, const std::string& stem) {
    double peak = 0.0;
    for (std::size_t i = 0; i < re.size(); ++i) peak = std::max({peak, std::abs(re[i]), std::abs(im[i])});
    if (peak == 0.0) peak = 1.0;
    write_plane_png(re, -peak, peak, dir / (stem + "_re.png"));
    write_plane_png(im, -peak, peak, dir / (stem + "_im.png"));
  };
  symmetric_plot(s.gt_phasor.re, s.gt_phasor.im, "gt_phasor");
  for (const auto& p : s.inputs) {
    symmetric_plot(p.re, p.im, "input_" + std::to_string(std::lround(p.frequency_hz / 1e6)) + "mhz");
  }
  out << "wrote plots for " << a.sample << " to " << a.out << '\n';
  return kExitOk;
}

}  // namespace

int execute(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"night: NLoS iToF dataset, rendering and evaluation toolkit", "night"};
  app.require_subcommand(1);
  app.allow_extras(false);

  GenerateArgs gen;
  auto* generate = app.add_subcommand("generate", "Generate a dataset from a config");
  generate->add_option("--config", gen.config, "Dataset config JSON")->check(CLI::ExistingFile);
  generate->add_option("--seed", gen.seed, "Master seed")->required();
  generate->add_option("--out", gen.out, "Output directory")->required();
  generate->add_option("--n", gen.n, "Number of scenes (overrides config n_scenes)");

  RenderArgs ren;
  auto* render = app.add_subcommand("render", "Render one scene file into a sample");
  render->add_option("--scene", ren.scene, "Scene JSON")->required()->check(CLI::ExistingFile);
  render->add_option("--config", ren.config, "Dataset config JSON")->check(CLI::ExistingFile);
  render->add_option("--out", ren.out, "Output sample file")->required();
  render->add_option("--id", ren.id, "Sample id (defaults to the output stem)");

  PreprocessArgs pre;
  auto* preprocess_cmd = app.add_subcommand("preprocess", "Convert samples to network inputs");
  preprocess_cmd->add_option("--manifest", pre.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  preprocess_cmd->add_option("--out", pre.out, "Output directory")->required();
  preprocess_cmd->add_option("--augment", pre.augment_copies, "Augmented copies per training sample");
  preprocess_cmd->add_option("--seed", pre.seed, "Augmentation seed");
  preprocess_cmd->add_option("--config", pre.config, "Dataset config JSON (noise_sigma)")->check(CLI::ExistingFile);
  preprocess_cmd->add_option("--noise-sigma", pre.noise_sigma, "Input noise sigma (overrides config)")->check(CLI::NonNegativeNumber);
  preprocess_cmd->add_flag("--heavy-noise", pre.heavy_noise, "Use sigma = 1.0");

  EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--pred", ev.pred, "Prediction directory")->required()->check(CLI::ExistingDirectory);
  eval->add_option("--gt", ev.gt, "Ground-truth manifest")->required()->check(CLI::ExistingFile);
  eval->add_option("--report", ev.report, "Report JSON output")->required();
  eval->add_option("--split", ev.split, "Only score this split (train/test)");
  eval->add_option("--alpha", ev.alpha, "Balanced MAE alpha");
  eval->add_option("--threshold", ev.threshold, "Depth threshold in meters");

  BaselineArgs base;
  auto* baseline = app.add_subcommand("baseline", "Naive depth of the NLoS input as prediction");
  baseline->add_option("--gt", base.gt, "Dataset manifest")->required()->check(CLI::ExistingFile);
  baseline->add_option("--out", base.out, "Prediction directory")->required();

  PointcloudArgs pc;
  auto* pointcloud = app.add_subcommand("export-pointcloud", "Depth map to an x y z point list");
  pointcloud->add_option("--sample", pc.sample, "Sample file")->required()->check(CLI::ExistingFile);
  pointcloud->add_option("--out", pc.out, "Output text file")->required();
  pointcloud->add_option("--source", pc.source, "gt, phasor or input")
      ->check(CLI::IsMember({"gt", "phasor", "input"}));

  PlotArgs pl;
  auto* plot = app.add_subcommand("plot", "Write 16-bit PNGs of a sample's planes");
  plot->add_option("--sample", pl.sample, "Sample file")->required()->check(CLI::ExistingFile);
  plot->add_option("--out", pl.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "night: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (generate->parsed()) return run_generate(gen, out);
    if (render->parsed()) return run_render(ren, out);
    if (preprocess_cmd->parsed()) return run_preprocess(pre, out);
    if (eval->parsed()) return run_eval(ev, out);
    if (baseline->parsed()) return run_baseline(base, out);
    if (pointcloud->parsed()) return run_pointcloud(pc, out);
    if (plot->parsed()) return run_plot(pl, out);
  } catch (const ConfigError& e) {
    err << "night: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SampleFormatError& e) {
    err << "night: invalid file: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SampleIoError& e) {
    err << "night: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const fs::filesystem_error& e) {
    err << "night: I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "night: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const DatasetError& e) {
    err << "night: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const SplitError& e) {
    err << "night: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    err << "night: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "night: validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "night: I/O error: " << e.what() << '\n';
    return kExitIo;
  }
  err << "night: no subcommand\n";
  return kExitConfig;
}

}  // namespace night::cli
