#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "night/cli.hpp"
#include "night/dataset.hpp"
#include "night/sample_io.hpp"
#include "night/scene_io.hpp"

using namespace night;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "night");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::execute(int(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::map<std::string, std::string> tree(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root))
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = slurp(e.path());
  return files;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

class Cli : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    root_ = fs::temp_directory_path() / "night_test_cli";
    fs::remove_all(root_);
    fs::create_directories(root_);
    nlohmann::json cfg = {{"width", 32},
                          {"height", 24},
                          {"render", {{"wall_patches", {16, 8}}, {"object_samples", 64}}},
                          {"n_scenes", 5}};
    std::ofstream(root_ / "config.json") << cfg.dump(2);
    const Result r = run({"generate", "--config", (root_ / "config.json").string(), "--seed", "7",
                          "--out", (root_ / "data").string()});
    ASSERT_EQ(r.code, 0) << r.err;
  }

  static fs::path cfg() { return root_ / "config.json"; }
  static fs::path data() { return root_ / "data"; }
  static fs::path manifest() { return root_ / "data" / "manifest.json"; }

  static inline fs::path root_;
};

}  // namespace

TEST_F(Cli, GenerateUsesConfigCountAndIsDeterministic) {
  EXPECT_EQ(load_manifest(manifest()).samples.size(), 5u);
  const Result r = run({"generate", "--config", cfg().string(), "--seed", "7", "--out",
                        (root_ / "data2").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(tree(data()), tree(root_ / "data2"));
  const Result other = run({"generate", "--config", cfg().string(), "--seed", "8", "--n", "2",
                            "--out", (root_ / "data3").string()});
  ASSERT_EQ(other.code, 0) << other.err;
  EXPECT_EQ(load_manifest(root_ / "data3" / "manifest.json").samples.size(), 2u);
  EXPECT_NE(slurp(data() / "samples" / "scene_000000.bin"),
            slurp(root_ / "data3" / "samples" / "scene_000000.bin"));
}

TEST_F(Cli, EvalOnGroundTruthIsPerfect) {
  const fs::path report = root_ / "perfect.json";
  const Result r = run({"eval", "--pred", (data() / "samples").string(), "--gt",
                        manifest().string(), "--report", report.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(report);
  EXPECT_EQ(j["miou"]["mean"].get<double>(), 1.0);
  EXPECT_LT(j["mae"]["mean"].get<double>(), 1e-3);
  EXPECT_EQ(j["per_sample"].size(), 5u);

  const Result t = run({"eval", "--pred", (data() / "samples").string(), "--gt",
                        manifest().string(), "--report", report.string(), "--split", "test"});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(read_json(report)["per_sample"].size(), 1u);
}

TEST_F(Cli, BaselineIsImperfect) {
  const Result b = run({"baseline", "--gt", manifest().string(), "--out", (root_ / "base").string()});
  ASSERT_EQ(b.code, 0) << b.err;
  const Result r = run({"eval", "--pred", (root_ / "base").string(), "--gt", manifest().string(),
                        "--report", (root_ / "base.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = read_json(root_ / "base.json");
  EXPECT_LT(j["miou"]["mean"].get<double>(), 1.0);
  EXPECT_GT(j["mae"]["mean"].get<double>(), 1.0);
}

TEST_F(Cli, RenderMatchesLibrary) {
  const DatasetConfig dc = load_dataset_config(cfg());
  const SceneDescription scene = sample_scene(99, dc.sampling);
  save_scene(scene, root_ / "scene.json");
  const Result r = run({"render", "--scene", (root_ / "scene.json").string(), "--config",
                        cfg().string(), "--out", (root_ / "one" / "s.bin").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const SampleRecord got = parse_sample(root_ / "one" / "s.bin");
  const SampleRecord want = make_sample(scene, dc, "s");
  EXPECT_EQ(got.id, "s");
  EXPECT_EQ(got.inputs, want.inputs);
  EXPECT_EQ(got.gt_depth, want.gt_depth);
}

TEST_F(Cli, PreprocessWritesInputsAndAugmentations) {
  const Result r = run({"preprocess", "--manifest", manifest().string(), "--out",
                        (root_ / "net").string(), "--augment", "2", "--seed", "3"});
  ASSERT_EQ(r.code, 0) << r.err;
  const DatasetManifest m = load_manifest(manifest());
  for (const auto& e : m.samples) {
    const NetworkInput x = parse_network_input(root_ / "net" / (e.id + ".nlin"));
    EXPECT_EQ(x.width(), 32u);
    for (double v : x.channels[0].data()) {
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, 1.0);
    }
    const bool train = e.meta.split == "train";
    EXPECT_EQ(fs::exists(root_ / "net" / (e.id + "_aug001.nlin")), train);
    if (train) {
      const SampleRecord t = parse_sample(root_ / "net" / (e.id + "_aug000.bin"));
      for (std::size_t i = 0; i < t.gt_mask.size(); ++i) EXPECT_EQ(t.gt_mask[i] == 1, t.gt_depth[i] > 0.0);
    }
  }
  const auto before = tree(root_ / "net");
  ASSERT_EQ(run({"preprocess", "--manifest", manifest().string(), "--out",
                 (root_ / "net").string(), "--augment", "2", "--seed", "3"}).code, 0);
  EXPECT_EQ(tree(root_ / "net"), before);

  nlohmann::json quiet = read_json(cfg());
  quiet["noise_sigma"] = 0.0;
  std::ofstream(root_ / "quiet.json") << quiet.dump();
  ASSERT_EQ(run({"preprocess", "--manifest", manifest().string(), "--out", (root_ / "net0").string(),
                 "--augment", "2", "--seed", "3", "--config", (root_ / "quiet.json").string()}).code,
            0);
  ASSERT_EQ(run({"preprocess", "--manifest", manifest().string(), "--out", (root_ / "net1").string(),
                 "--augment", "2", "--seed", "3", "--noise-sigma", "0"}).code,
            0);
  EXPECT_EQ(tree(root_ / "net0"), tree(root_ / "net1"));
  EXPECT_NE(tree(root_ / "net0"), before);
}

TEST_F(Cli, PlotAndPointcloudLeaveInputsUntouched) {
  const fs::path sample = data() / "samples" / "scene_000001.bin";
  const std::string bytes = slurp(sample);
  ASSERT_EQ(run({"plot", "--sample", sample.string(), "--out", (root_ / "plots").string()}).code, 0);
  for (const char* f : {"gt_depth.png", "gt_mask.png", "gt_phasor_re.png", "gt_phasor_im.png",
                        "input_20mhz_re.png", "input_50mhz_im.png", "input_60mhz_re.png"}) {
    EXPECT_TRUE(fs::exists(root_ / "plots" / f)) << f;
  }
  const Result pc = run({"export-pointcloud", "--sample", sample.string(), "--out",
                         (root_ / "pc.xyz").string()});
  ASSERT_EQ(pc.code, 0) << pc.err;
  EXPECT_EQ(slurp(sample), bytes);

  const SampleRecord s = parse_sample(sample);
  std::size_t n_obj = 0;
  for (auto v : s.gt_mask.data()) n_obj += v;
  std::ifstream in(root_ / "pc.xyz");
  std::size_t lines = 0;
  double x, y, z;
  while (in >> x >> y >> z) {
    ++lines;
    EXPECT_LT(x, 0.0);  // mirrored objects lie behind the front wall plane
  }
  EXPECT_EQ(lines, n_obj);
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, cli::kExitConfig);
  EXPECT_EQ(run({"frobnicate"}).code, cli::kExitConfig);
  EXPECT_EQ(run({"generate", "--seed", "1"}).code, cli::kExitConfig);
  EXPECT_EQ(run({"generate", "--seed", "x", "--out", "o"}).code, cli::kExitConfig);

  std::ofstream(root_ / "bad_cfg.json") << R"({"widht": 3})";
  const Result bad = run({"generate", "--config", (root_ / "bad_cfg.json").string(), "--seed", "1",
                          "--out", (root_ / "x").string()});
  EXPECT_EQ(bad.code, cli::kExitConfig);
  EXPECT_NE(bad.err.find("widht"), std::string::npos);

  std::ofstream(root_ / "plain_file") << "x";
  EXPECT_EQ(run({"generate", "--config", cfg().string(), "--seed", "1", "--n", "1", "--out",
                 (root_ / "plain_file").string()}).code,
            cli::kExitIo);

  fs::create_directories(root_ / "partial");
  fs::copy_file(data() / "samples" / "scene_000000.bin", root_ / "partial" / "scene_000000.bin",
                fs::copy_options::overwrite_existing);
  const Result missing = run({"eval", "--pred", (root_ / "partial").string(), "--gt",
                              manifest().string(), "--report", (root_ / "r.json").string()});
  EXPECT_EQ(missing.code, cli::kExitIo);
  EXPECT_NE(missing.err.find("scene_000001"), std::string::npos);

  std::string bytes = slurp(data() / "samples" / "scene_000000.bin");
  bytes[0] = 'X';
  std::ofstream(root_ / "corrupt.bin", std::ios::binary) << bytes;
  EXPECT_EQ(run({"plot", "--sample", (root_ / "corrupt.bin").string(), "--out",
                 (root_ / "p2").string()}).code,
            cli::kExitValidation);

  SceneDescription visible = make_corner_scene();
  Primitive p;
  p.pose.position = {0.3, -0.2, 1.6};
  p.size = {0.15, 0, 0};
  visible.objects.push_back(p);
  save_scene(visible, root_ / "visible.json");
  EXPECT_EQ(run({"render", "--scene", (root_ / "visible.json").string(), "--config", cfg().string(),
                 "--out", (root_ / "v.bin").string()}).code,
            cli::kExitValidation);

  std::ofstream(root_ / "noschema.json") << "{}";
  EXPECT_EQ(run({"render", "--scene", (root_ / "noschema.json").string(), "--out",
                 (root_ / "v.bin").string()}).code,
            cli::kExitConfig);
}

TEST(CliBinary, ExitStatusFromProcess) {
  const std::string bin = NIGHT_CLI_PATH;
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " --help > /dev/null").c_str())), 0);
  EXPECT_EQ(WEXITSTATUS(std::system((bin + " generate > /dev/null 2>&1").c_str())), cli::kExitConfig);
}
