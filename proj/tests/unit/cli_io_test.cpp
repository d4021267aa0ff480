#include <gtest/gtest.h>
#include <png.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "msmsf/checkpoint.hpp"
#include "msmsf/cli.hpp"
#include "msmsf/errors.hpp"
#include "msmsf/io.hpp"
#include "msmsf/model.hpp"
#include "msmsf/run_config.hpp"
#include "msmsf/synthetic.hpp"

namespace fs = std::filesystem;

namespace msmsf {
namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path(MSMSF_TEST_TMPDIR) / "cli_io" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  args.insert(args.begin(), "msmsf");
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

TEST(Io, Png8BitRoundTrip) {
  const fs::path dir = scratch("png8");
  Image img(3, 5, 7);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = float(i % 256) / 255.0f;
  write_png(img, dir / "a.png");
  EXPECT_EQ(read_image(dir / "a.png"), img);

  BinaryMap m(4, 6, 0);
  m.at(1, 2) = m.at(3, 5) = 1;
  write_png(m, dir / "m.png");
  EXPECT_EQ(read_edge_map(dir / "m.png"), m);
}

TEST(Io, Png16BitIsScaledToUnitRange) {
  const fs::path dir = scratch("png16");
  png_image im{};
  im.version = PNG_IMAGE_VERSION;
  im.width = 3;
  im.height = 1;
  im.format = PNG_FORMAT_LINEAR_Y;
  const png_uint_16 px[3] = {0, 32768, 65535};
  ASSERT_TRUE(png_image_write_to_file(&im, (dir / "g.png").c_str(), 0, px, 0, nullptr));
  const Image r = read_image(dir / "g.png");
  ASSERT_EQ(r.c, 1u);
  EXPECT_FLOAT_EQ(r.data[0], 0.0f);
  EXPECT_NEAR(r.data[1], 32768.0 / 65535.0, 1e-6);
  EXPECT_FLOAT_EQ(r.data[2], 1.0f);
}

TEST(Io, PnmBinaryAndAscii) {
  const fs::path dir = scratch("pnm");
  {
    std::ofstream f(dir / "a.pgm", std::ios::binary);
    f << "P5\n# comment\n2 2\n255\n";
    const unsigned char b[4] = {0, 51, 102, 255};
    f.write(reinterpret_cast<const char*>(b), 4);
  }
  const Image g = read_image(dir / "a.pgm");
  ASSERT_EQ(g.c, 1u);
  EXPECT_FLOAT_EQ(g.data[1], 0.2f);
  EXPECT_FLOAT_EQ(g.data[3], 1.0f);
  write_text_file(dir / "b.ppm", "P3\n1 1\n10\n0 5 10\n");
  const Image c = read_image(dir / "b.ppm");
  ASSERT_EQ(c.c, 3u);
  EXPECT_FLOAT_EQ(c.data[1], 0.5f);
  write_text_file(dir / "bad.pgm", "P5\n2 2\n255\n");
  EXPECT_THROW(read_image(dir / "bad.pgm"), DataError);
  EXPECT_THROW(read_image(dir / "missing.png"), DataError);
}

TEST(Io, FloatSidecarIsExact) {
  const fs::path dir = scratch("f32");
  EdgeProbabilityMap m{Plane<float>(3, 4)};
  for (std::size_t i = 0; i < m.values.data.size(); ++i) m.values.data[i] = 1.0f / float(i + 3);
  write_prediction(m, dir / "p");
  EXPECT_TRUE(fs::exists(dir / "p.png"));
  EXPECT_EQ(read_prediction(dir / "p"), m);
  write_text_file(dir / "bad.f32", "MSF32\n\x02");
  EXPECT_THROW(read_float_map(dir / "bad.f32"), DataError);
}

TEST(Manifest, ResolutionAndErrors) {
  const fs::path dir = scratch("manifest");
  write_synthetic_dataset(dir / "d", 2, 1, 16, 16);
  const DatasetManifest m = load_manifest("d/manifest.json", dir);
  ASSERT_EQ(m.entries.size(), 2u);
  EXPECT_TRUE(fs::exists(m.entries[0].image));
  EXPECT_EQ(m.entries[1].stem(), "synth_001");
  EXPECT_THROW(load_manifest("nope.json", dir), ConfigError);

  write_text_file(dir / "d" / "extra.json", R"({"name":"x","split":"train","entries":[],"bogus":1})");
  EXPECT_THROW(load_manifest(dir / "d" / "extra.json", dir), ConfigError);
  write_text_file(dir / "d" / "gone.json",
                  R"({"name":"x","split":"train","entries":[{"image":"images/none.png","annotations":[]}]})");
  EXPECT_THROW(load_manifest(dir / "d" / "gone.json", dir), DataError);
  write_text_file(dir / "d" / "dup.json", R"({"name":"x","split":"test","entries":[
    {"image":"images/synth_000.png","annotations":["gt/synth_000.png"]},
    {"image":"images/synth_000.png","annotations":["gt/synth_000.png"]}]})");
  EXPECT_THROW(load_manifest(dir / "d" / "dup.json", dir), DataError);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(cli({"bogus"}).code, kExitConfig);
  // Not a profile name, so it is read as a path.
  EXPECT_EQ(cli({"inspect", "no-such-profile"}).code, kExitData);
  EXPECT_EQ(cli({"train", "--config", "/nonexistent/run.json"}).code, kExitConfig);
  const fs::path dir = scratch("exit");
  write_text_file(dir / "m.json", R"({"name":"x","split":"test","entries":[]})");
  EXPECT_EQ(cli({"eval", "--pred", (dir / "none").string(), "--manifest", (dir / "m.json").string()}).code, kExitConfig);
  // No prediction pairs with any ground-truth entry.
  fs::create_directories(dir / "pred");
  write_synthetic_dataset(dir / "d", 1, 1, 16, 16);
  EXPECT_EQ(cli({"eval", "--pred", (dir / "pred").string(), "--manifest", (dir / "d" / "manifest.json").string()}).code,
            kExitData);
}

TEST(Cli, InspectReportsDepth) {
  const CliRun r = cli({"inspect", "paper-depth"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_NE(r.out.find("weight layers: 74"), std::string::npos);
  EXPECT_NE(r.out.find("parameters: " + std::to_string(count_parameters(MsmsfNetConfig::paper_depth()))),
            std::string::npos);
}

class CliPipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = scratch("pipeline");
    ASSERT_EQ(cli({"--root", dir_.string(), "synth", "--output", "data", "--count", "3", "--size", "24"}).code, 0);
    write_text_file(dir_ / "run.json", R"({
      "net": "tiny", "dataset": "biped", "manifest": "data/manifest.json", "output_dir": "run", "seed": 3,
      "train": {"batch_size": 2, "initial_lr": 0.001, "max_steps": 4, "checkpoint_every": 1, "crop": [24, 24]}
    })");
  }
  static fs::path dir_;
};
fs::path CliPipeline::dir_;

TEST_F(CliPipeline, TrainIsByteReproducible) {
  const std::string root = dir_.string();
  ASSERT_EQ(cli({"--root", root, "train", "--config", "run.json", "--output", "a"}).code, kExitOk);
  ASSERT_EQ(cli({"--root", root, "train", "--config", "run.json", "--output", "b"}).code, kExitOk);
  const std::string a = read_text_file(dir_ / "a" / "loss.csv");
  EXPECT_EQ(a, read_text_file(dir_ / "b" / "loss.csv"));
  EXPECT_EQ(a.rfind("# seed=3", 0), 0u);
  EXPECT_EQ(read_text_file(dir_ / "a" / "final.ckpt"), read_text_file(dir_ / "b" / "final.ckpt"));

  const Checkpoint ck = read_checkpoint(dir_ / "a" / "final.ckpt");
  std::size_t total = 0;
  for (const auto& e : ck.entries)
    if (e.name.rfind("state/", 0) != 0) total += e.values.size();
  EXPECT_EQ(total, count_parameters(MsmsfNetConfig::tiny()));
  EXPECT_EQ(count_parameters(load_checkpoint(dir_ / "a" / "final.ckpt", MsmsfNetConfig::tiny())),
            count_parameters(MsmsfNetConfig::tiny()));
}

TEST_F(CliPipeline, PredictAndEvaluate) {
  const std::string root = dir_.string();
  if (!fs::exists(dir_ / "a" / "final.ckpt"))
    ASSERT_EQ(cli({"--root", root, "train", "--config", "run.json", "--output", "a"}).code, kExitOk);
  const CliRun p = cli({"--root", root, "predict", "--checkpoint", "a/final.ckpt", "--manifest", "data/manifest.json",
                        "--output", "pred"});
  ASSERT_EQ(p.code, kExitOk) << p.err;
  std::size_t pngs = 0;
  for (const auto& f : fs::directory_iterator(dir_ / "pred")) pngs += f.path().extension() == ".png";
  EXPECT_EQ(pngs, 3u);

  const CliRun e1 = cli({"--root", root, "eval", "--pred", "pred", "--manifest", "data/manifest.json", "--dataset",
                         "nyud", "--output", "ev1"});
  ASSERT_EQ(e1.code, kExitOk) << e1.err;
  EXPECT_NE(e1.out.find("0.011"), std::string::npos);
  ASSERT_EQ(cli({"--root", root, "eval", "--pred", "pred", "--manifest", "data/manifest.json", "--dataset", "nyud",
                 "--output", "ev2"})
                .code,
            kExitOk);
  EXPECT_EQ(read_text_file(dir_ / "ev1" / "report.txt"), read_text_file(dir_ / "ev2" / "report.txt"));
  EXPECT_EQ(read_text_file(dir_ / "ev1" / "pr.svg"), read_text_file(dir_ / "ev2" / "pr.svg"));

  const CliRun bad = cli({"--root", root, "predict", "--checkpoint", "a/final.ckpt", "--modality-average",
                          "--manifest", "data/manifest.json", "--output", "x"});
  EXPECT_EQ(bad.code, kExitConfig);
}

}  // namespace
}  // namespace msmsf
