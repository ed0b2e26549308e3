// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mint/cli/commands.hpp"
#include "mint/data/dataset_io.hpp"
#include "mint/detect/detector.hpp"
#include "mint/rvae/model.hpp"

namespace mint::cli {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) ++n;
  return n;
}

TEST(RunConfig, SetGetRoundTrip) {
  RunConfig c;
  set_value(c, "vae.epochs", "12");
  set_value(c, "vae.mlp_dims", "32, 16,8");
  set_value(c, "detector.backbone", "lstm");
  set_value(c, "detector.variants", "pose_only,multimodal+vae");
  set_value(c, "generate.positive_only", "yes");
  set_value(c, "benchmark.env", "3");
  EXPECT_EQ(c.vae.epochs, 12u);
  EXPECT_EQ(c.vae.mlp_dims, (std::array<std::size_t, 3>{32, 16, 8}));
  EXPECT_EQ(c.detector.backbone, detect::Backbone::kLstm);
  EXPECT_EQ(c.variants.size(), 2u);
  EXPECT_TRUE(c.generate.positive_only);
  EXPECT_EQ(c.benchmark.env, data::Environment::kEnv3);
  EXPECT_EQ(get_value(c, "detector.variants"), "pose_only,multimodal+vae");
  set_value(c, "detector.variants", "all");
  EXPECT_EQ(c.variants.size(), 4u);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  RunConfig c;
  EXPECT_THROW(set_value(c, "vae.epoch", "3"), ConfigError);
  EXPECT_THROW(set_value(c, "vae.epochs", "-3"), ConfigError);
  EXPECT_THROW(set_value(c, "vae.epochs", "3x"), ConfigError);
  EXPECT_THROW(set_value(c, "vae.dropout", "nan"), ConfigError);
  EXPECT_THROW(set_value(c, "detector.backbone", "cnn"), ConfigError);
  EXPECT_THROW(set_value(c, "generate.positive_only", "maybe"), ConfigError);
  EXPECT_THROW(set_value(c, "benchmark.env", "4"), ConfigError);
}

TEST(RunConfig, IniSectionsAndErrors) {
  RunConfig c;
  std::istringstream ok("; comment\n[vae]\nepochs = 9\n[run]\nseed = 42\n");
  apply_ini(c, ok);
  EXPECT_EQ(c.vae.epochs, 9u);
  EXPECT_EQ(c.seed, 42u);

  std::istringstream unknown("[vae]\nepochz = 9\n");
  try {
    apply_ini(c, unknown, "x.ini");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("vae.epochz"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("x.ini"), std::string::npos);
  }
  std::istringstream orphan("seed = 3\n");
  EXPECT_THROW(apply_ini(c, orphan), ConfigError);
  std::istringstream bad_section("[nonsense]\nkey = 1\n");
  EXPECT_THROW(apply_ini(c, bad_section), ConfigError);
}

TEST(RunConfig, WrittenIniReproducesConfig) {
  RunConfig c;
  set_value(c, "vae.learning_rate", "0.00037");
  set_value(c, "detector.variants", "all");
  set_value(c, "run.out", "somewhere");
  std::stringstream ini;
  write_ini(ini, c);
  RunConfig d;
  apply_ini(d, ini);
  for (const auto& k : config_keys()) EXPECT_EQ(get_value(c, k.name), get_value(d, k.name)) << k.name;
}

TEST(RunConfig, ScaleMultipliesEpochs) {
  RunConfig c;
  c.scale = 0.01;
  EXPECT_EQ(scaled_vae(c).epochs, 7u);
  EXPECT_DOUBLE_EQ(scaled_vae(c).warmup_epochs, 50.0);
  EXPECT_EQ(scaled_detector(c).epochs, 2u);
  c.scale = 0.0;
  EXPECT_THROW(validate(c), ConfigError);
}

class CliRun : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("mint_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(std::vector<std::string> args) {
    out_.str({});
    err_.str({});
    return run_cli(args, out_, err_);
  }

  std::string benchmark(const std::string& name = "bench", std::size_t sequences = 12) {
    const auto dir = (root_ / name).string();
    EXPECT_EQ(run({"make-benchmark", "--out", dir, "--set", "benchmark.sequences=" + std::to_string(sequences),
                   "--set", "benchmark.min_length=40", "--set", "benchmark.max_length=60"}),
              kExitOk)
        << err_.str();
    return dir + "/benchmark.jsonl";
  }

  std::vector<std::string> tiny(std::vector<std::string> args) {
    for (const char* kv : {"vae.latent_dim=4", "vae.mlp_dims=8,6,5", "vae.encoder_hidden=6", "vae.decoder_hidden=6",
                           "vae.decoder_input_dim=5", "vae.output_hidden=7", "vae.epochs=2", "vae.warmup_epochs=1",
                           "detector.backbone=gru", "detector.hidden=8", "detector.epochs=2", "experiment.folds=3",
                           "experiment.train_stride=10", "experiment.eval_stride=10"}) {
      args.push_back("--set");
      args.push_back(kv);
    }
    return args;
  }

  fs::path root_;
  std::ostringstream out_, err_;
};

TEST_F(CliRun, UsageErrorsExitTwo) {
  EXPECT_EQ(run({}), kExitUsage);
  EXPECT_EQ(run({"frobnicate"}), kExitUsage);
  EXPECT_EQ(run({"preprocess", "--set", "data.dataset=/no/such/file.jsonl", "--out", root_.string()}), kExitUsage);
  EXPECT_NE(err_.str().find("/no/such/file.jsonl"), std::string::npos);
  EXPECT_EQ(run({"preprocess"}), kExitUsage);
  EXPECT_EQ(run({"preprocess", "--set", "vae.nope=1"}), kExitUsage);
  EXPECT_EQ(run({"preprocess", "--config", (root_ / "missing.ini").string()}), kExitUsage);
  EXPECT_EQ(run({"--help"}), kExitOk);
}

TEST_F(CliRun, MalformedInputExitsOne) {
  const auto path = root_ / "broken.jsonl";
  std::ofstream(path) << "{\"id\": \"x\", \"env\": 1, \"frames\": [}\n";
  EXPECT_EQ(run({"preprocess", "--set", "data.dataset=" + path.string(), "--out", (root_ / "p").string()}),
            kExitFailure);
}

TEST_F(CliRun, PreprocessIsDeterministic) {
  const auto data = benchmark();
  const auto a = root_ / "a", b = root_ / "b";
  ASSERT_EQ(run({"preprocess", "--set", "data.dataset=" + data, "--out", a.string()}), kExitOk) << err_.str();
  EXPECT_NE(out_.str().find("positive)"), std::string::npos);
  ASSERT_EQ(run({"preprocess", "--set", "data.dataset=" + data, "--out", b.string()}), kExitOk);
  for (const char* f : {"standardized.jsonl", "standardizer.json", "windows.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST_F(CliRun, ConfigFileAndFlagPrecedence) {
  const auto data = benchmark();
  const auto ini = root_ / "run.ini";
  std::ofstream(ini) << "[data]\ndataset = " << data << "\n[run]\nseed = 3\nout = " << (root_ / "from_file").string()
                     << "\n";
  ASSERT_EQ(run({"preprocess", "--config", ini.string(), "--seed", "8", "--out", (root_ / "flag").string()}), kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(root_ / "flag" / "windows.csv"));
  EXPECT_FALSE(fs::exists(root_ / "from_file"));
  RunConfig written;
  apply_ini_file(written, (root_ / "flag" / "config.ini").string());
  EXPECT_EQ(written.seed, 8u);
  EXPECT_EQ(written.dataset, data);
}

TEST_F(CliRun, TrainVaeThenGenerate) {
  const auto data = benchmark();
  const auto vae_dir = root_ / "vae";
  ASSERT_EQ(run(tiny({"train-vae", "--set", "data.dataset=" + data, "--out", vae_dir.string()})), kExitOk)
      << err_.str();
  EXPECT_EQ(line_count(vae_dir / "vae_loss.csv"), 3u);
  EXPECT_NO_THROW(rvae::load_rvae((vae_dir / "vae.json").string()));

  const auto gen_dir = root_ / "gen";
  ASSERT_EQ(run({"generate", "--set", "data.dataset=" + data, "--set",
                 "data.vae_checkpoint=" + (vae_dir / "vae.json").string(), "--set", "generate.count=100", "--out",
                 gen_dir.string()}),
            kExitOk)
      << err_.str();
  const auto synthetic = data::load_dataset((gen_dir / "synthetic.jsonl").string());
  ASSERT_EQ(synthetic.size(), 100u);
  for (const auto& r : synthetic) {
    EXPECT_EQ(r.frames.size(), 15u);
    for (const auto& f : r.frames) EXPECT_FALSE(check_frame(f).has_value());
  }

  const auto d_dir = root_ / "disc";
  ASSERT_EQ(run({"discriminative-score", "--set", "data.dataset=" + data, "--set",
                 "data.synthetic=" + (gen_dir / "synthetic.jsonl").string(), "--set", "discriminative.epochs=2",
                 "--out", d_dir.string()}),
            kExitOk)
      << err_.str();
  EXPECT_NE(slurp(d_dir / "discriminative.txt").find("score = "), std::string::npos);
}

TEST_F(CliRun, AblationWritesFourRowsAndCheckpointsEvaluate) {
  const auto data = benchmark();
  const auto det_dir = root_ / "det";
  ASSERT_EQ(run(tiny({"train-detector", "--set", "data.dataset=" + data, "--set", "detector.variants=all", "--out",
                      det_dir.string()})),
            kExitOk)
      << err_.str();
  EXPECT_EQ(line_count(det_dir / "results.csv"), 5u);
  for (const char* f : {"detector_pose_only.json", "detector_multimodal_vae.json", "vae_multimodal_vae_loss.csv",
                        "detector_emotion_only_loss.csv", "report.txt", "pr_sweep.csv"}) {
    EXPECT_TRUE(fs::exists(det_dir / f)) << f;
  }

  const auto eval_dir = root_ / "eval";
  ASSERT_EQ(run({"evaluate", "--set", "data.dataset=" + data, "--set",
                 "data.detector_checkpoint=" + (det_dir / "detector_multimodal.json").string(), "--out",
                 eval_dir.string()}),
            kExitOk)
      << err_.str();
  EXPECT_NE(slurp(eval_dir / "report.txt").find("all.frame_auroc = "), std::string::npos);
  EXPECT_TRUE(fs::exists(eval_dir / "predictions" / "0.csv"));
}

TEST_F(CliRun, CrossvalAndHeldoutAreReproducible) {
  const auto data = benchmark();
  const auto a = root_ / "cv_a", b = root_ / "cv_b";
  ASSERT_EQ(run(tiny({"crossval", "--set", "data.dataset=" + data, "--out", a.string()})), kExitOk) << err_.str();
  ASSERT_EQ(run(tiny({"crossval", "--set", "data.dataset=" + data, "--out", b.string()})), kExitOk);
  EXPECT_EQ(slurp(a / "report.txt"), slurp(b / "report.txt"));
  EXPECT_NE(slurp(a / "report.txt").find("fold3.sequence_auroc"), std::string::npos);

  EXPECT_EQ(run(tiny({"heldout-env3", "--set", "data.dataset=" + data, "--out", (root_ / "h0").string()})),
            kExitUsage);
  const auto env3 = root_ / "env3";
  ASSERT_EQ(run({"make-benchmark", "--out", env3.string(), "--set", "benchmark.env=3", "--set",
                 "benchmark.sequences=6", "--set", "benchmark.min_length=40", "--set", "benchmark.max_length=60"}),
            kExitOk);
  ASSERT_EQ(run(tiny({"heldout-env3", "--set", "data.dataset=" + data, "--set",
                      "data.env3_dataset=" + (env3 / "benchmark.jsonl").string(), "--out", (root_ / "h").string()})),
            kExitOk)
      << err_.str();
  EXPECT_NE(slurp(root_ / "h" / "report.txt").find("split2.frame_auroc"), std::string::npos);
}

TEST_F(CliRun, ConfigKeysListsDefaults) {
  ASSERT_EQ(run({"config-keys"}), kExitOk);
  EXPECT_NE(out_.str().find("vae.epochs = 700"), std::string::npos);
  EXPECT_NE(out_.str().find("detector.patience = 50"), std::string::npos);
}

}  // namespace
}  // namespace mint::cli
