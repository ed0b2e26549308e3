// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <json.hpp>
#include <sstream>

#include "mint/data/benchmark.hpp"
#include "mint/data/dataset_io.hpp"
#include "mint/data/frame.hpp"
#include "mint/data/splits.hpp"
#include "mint/data/standardizer.hpp"
#include "mint/data/tensorize.hpp"
#include "mint/data/windows.hpp"
#include "mint/numerics/rng.hpp"

namespace mint::data {
namespace {

FrameFeature valid_frame(double x = 0.5, int label = 0) {
  FrameFeature f;
  for (std::size_t k = 0; k < kKeypoints; ++k) f.pose[k] = {x + 0.01 * k, 0.2 + 0.03 * k, 0.9};
  f.emotion = {0.1, 0.1, 0.1, 0.4, 0.1, 0.1, 0.1};
  f.label = label;
  return f;
}

SequenceRecord record(std::string id, std::size_t length, std::size_t positives,
                      Environment env = Environment::kEnv1) {
  SequenceRecord r{std::move(id), env, {}};
  for (std::size_t t = 0; t < length; ++t) {
    r.frames.push_back(valid_frame(0.3 + 0.001 * t, t >= length - positives ? 1 : 0));
  }
  return r;
}

RawFrame raw_with(double x, double y) {
  RawFrame raw;
  raw.bbox = {100, 100, 200, 400};
  for (auto& k : raw.pose_px) k = {x, y, 0.7};
  raw.emotion = {1, 0, 0, 0, 0, 0, 0};
  return raw;
}

TEST(NormalizePose, MapsIntoBox) {
  const auto f = normalize_pose(raw_with(150, 200));
  EXPECT_DOUBLE_EQ(f.pose[0].x, 0.25);
  EXPECT_DOUBLE_EQ(f.pose[0].y, 0.25);
  EXPECT_DOUBLE_EQ(f.pose[0].c, 0.7);
}

TEST(NormalizePose, CornerAndOutside) {
  const auto corner = normalize_pose(raw_with(100, 100));
  EXPECT_DOUBLE_EQ(corner.pose[3].x, 0.0);
  EXPECT_DOUBLE_EQ(corner.pose[3].y, 0.0);
  const auto outside = normalize_pose(raw_with(90, 100));
  EXPECT_DOUBLE_EQ(outside.pose[5].x, -0.05);
  EXPECT_DOUBLE_EQ(outside.pose[5].y, 0.0);
}

TEST(NormalizePose, ZeroAreaBoxRejected) {
  auto raw = raw_with(1, 1);
  raw.bbox.width = 0;
  EXPECT_THROW(normalize_pose(raw), ValidationError);
}

TEST(Frame, FlattenRoundTrip) {
  const auto f = valid_frame(0.4, 1);
  const auto flat = f.flatten();
  EXPECT_EQ(flat.size(), kFrameDims);
  EXPECT_DOUBLE_EQ(flat[kLabelIndex], 1.0);
  EXPECT_EQ(FrameFeature::unflatten(flat), f);
}

TEST(Frame, InvariantsChecked) {
  EXPECT_FALSE(check_frame(valid_frame()).has_value());
  auto f = valid_frame();
  f.emotion[0] = 0.0;  // sums to 0.9
  EXPECT_TRUE(check_frame(f).has_value());
  f = valid_frame();
  f.pose[2].c = 1.5;
  EXPECT_THROW(validate_frame(f), ValidationError);
  f = valid_frame();
  f.pose[0].x = std::nan("");
  EXPECT_THROW(validate_frame(f), ValidationError);
}

TEST(Standardizer, OwnInputHasZeroMeanUnitStd) {
  nn::Rng rng(5);
  std::vector<FrameFeature> frames;
  for (int i = 0; i < 200; ++i) {
    auto f = valid_frame();
    for (auto& k : f.pose) {
      k.x = rng.normal(0.4, 0.2);
      k.y = rng.normal(-0.1, 0.05);
    }
    frames.push_back(f);
  }
  const auto s = fit_standardizer(frames);
  for (std::size_t d = 0; d < kCoordDims; ++d) {
    double sum = 0.0, sq = 0.0;
    for (const auto& f : frames) sum += s.apply(f).flatten()[d / 2 * 3 + d % 2];
    const double mean = sum / frames.size();
    for (const auto& f : frames) {
      const double v = s.apply(f).flatten()[d / 2 * 3 + d % 2] - mean;
      sq += v * v;
    }
    EXPECT_NEAR(mean, 0.0, 1e-9);
    EXPECT_NEAR(std::sqrt(sq / frames.size()), 1.0, 1e-9);
  }
}

TEST(Standardizer, ConstantCoordinateFlooredToZero) {
  std::vector<FrameFeature> frames(5, valid_frame());
  frames[1].pose[0].x = 0.9;
  const auto s = fit_standardizer(frames);
  EXPECT_DOUBLE_EQ(s.stds()[1], kStdFloor);
  EXPECT_DOUBLE_EQ(s.apply(frames[0]).pose[0].y, 0.0);
}

TEST(Standardizer, LeavesConfidenceEmotionLabel) {
  std::vector<FrameFeature> frames = {valid_frame(0.1, 1), valid_frame(0.7, 0)};
  const auto s = fit_standardizer(frames);
  const auto out = s.apply(frames[0]);
  EXPECT_EQ(out.emotion, frames[0].emotion);
  EXPECT_EQ(out.label, 1);
  EXPECT_DOUBLE_EQ(out.pose[4].c, frames[0].pose[4].c);
  const auto back = s.invert(out);
  EXPECT_NEAR(back.pose[4].x, frames[0].pose[4].x, 1e-12);
}

TEST(Standardizer, EmptyRejectedAndFileRoundTrip) {
  std::vector<FrameFeature> none;
  EXPECT_THROW(fit_standardizer(none), ValidationError);
  std::vector<FrameFeature> frames = {valid_frame(0.1), valid_frame(0.3), valid_frame(0.8)};
  const auto s = fit_standardizer(frames);
  const auto path = (std::filesystem::temp_directory_path() / "mint_std_test.json").string();
  save_standardizer(s, path);
  EXPECT_EQ(load_standardizer(path), s);
  std::filesystem::remove(path);
}

TEST(Windows, ThirtyFramesStrideFifteen) {
  const auto set = window_sequences({record("a", 30, 0)}, 15, 15);
  ASSERT_EQ(set.windows.size(), 2u);
  EXPECT_EQ(set.windows[1].start, 15u);
  EXPECT_EQ(set.skipped_records, 0u);
}

TEST(Windows, ShortRecordSkipped) {
  const auto set = window_sequences({record("a", 10, 0), record("b", 20, 0)}, 15, 5);
  EXPECT_EQ(set.skipped_records, 1u);
  EXPECT_EQ(set.windows.size(), 2u);
}

TEST(Windows, ScatteredSevenPositive) {
  std::vector<int> labels(15, 0);
  for (int i : {0, 2, 4, 7, 9, 12, 14}) labels[i] = 1;
  EXPECT_EQ(window_label_from_frames(std::span<const int>(labels)), 1);
  labels[14] = 0;
  EXPECT_EQ(window_label_from_frames(std::span<const int>(labels)), 0);
}

TEST(Windows, InputAndTargetViews) {
  auto w = window_sequences({record("a", 15, 3)}).windows.at(0);
  ASSERT_EQ(w.input_view().size(), 14u);
  ASSERT_EQ(w.target_view().size(), 14u);
  EXPECT_EQ(w.input_view()[1], w.frames[1]);
  EXPECT_EQ(w.target_view()[0], w.frames[1]);
}

std::vector<SequenceRecord> mixed_records(std::size_t n, std::size_t positives) {
  std::vector<SequenceRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(record("s" + std::to_string(i), 20, i < positives ? 8 : 0));
  }
  return out;
}

TEST(Splits, KFoldPartitions) {
  const auto records = mixed_records(10, 5);
  const auto folds = stratified_kfold(records, 5, 3);
  ASSERT_EQ(folds.size(), 5u);
  std::set<std::size_t> seen;
  for (const auto& f : folds) {
    EXPECT_EQ(f.validation.size(), 2u);
    EXPECT_EQ(f.train.size(), 8u);
    for (auto i : f.validation) EXPECT_TRUE(seen.insert(i).second);
    std::set<std::size_t> both(f.train.begin(), f.train.end());
    for (auto i : f.validation) EXPECT_EQ(both.count(i), 0u);
  }
  EXPECT_EQ(seen.size(), 10u);
}

TEST(Splits, KFoldStratified) {
  const auto records = mixed_records(50, 30);
  for (const auto& f : stratified_kfold(records, 5, 11)) {
    std::size_t pos = 0;
    for (auto i : f.validation) pos += records[i].has_positive();
    const double expected = 0.6 * f.validation.size();
    EXPECT_LE(std::abs(static_cast<double>(pos) - expected), 1.0);
  }
}

TEST(Splits, KFoldDeterministicAndErrors) {
  const auto records = mixed_records(12, 6);
  const auto a = stratified_kfold(records, 4, 9);
  const auto b = stratified_kfold(records, 4, 9);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].validation, b[i].validation);
  EXPECT_THROW(stratified_kfold(records, 13, 9), std::invalid_argument);
}

TEST(Splits, TwoSplitHeldout) {
  const auto records = mixed_records(20, 8);
  const auto halves = two_split_heldout(records, 4);
  EXPECT_EQ(halves[0].size(), 10u);
  EXPECT_EQ(halves[1].size(), 10u);
  EXPECT_EQ(two_split_heldout(records, 4), halves);
  auto with_env3 = records;
  with_env3[3].env = Environment::kEnv3;
  EXPECT_THROW(two_split_heldout(with_env3, 4), std::invalid_argument);
}

WindowSample positive_window() {
  std::vector<FrameFeature> frames(15, valid_frame(0.5, 1));
  return make_window(frames, "gen");
}

TEST(Rebalance, SeventyThirtyToHalf) {
  std::vector<WindowSample> windows;
  for (int i = 0; i < 70; ++i) windows.push_back(make_window(std::vector<FrameFeature>(15, valid_frame())));
  for (int i = 0; i < 30; ++i) windows.push_back(positive_window());
  EXPECT_EQ(synthetic_windows_needed(30, 100, 0.5), 40u);
  const auto out = rebalance(windows, positive_window, 0.5);
  EXPECT_EQ(out.size(), 140u);
  EXPECT_EQ(count_positive_windows(out), 70u);
  EXPECT_TRUE(std::equal(windows.begin(), windows.end(), out.begin()));
}

TEST(Rebalance, BalancedUnchanged) {
  std::vector<WindowSample> windows = {make_window(std::vector<FrameFeature>(15, valid_frame())),
                                       positive_window()};
  EXPECT_EQ(rebalance(windows, positive_window, 0.5), windows);
}

TEST(Rebalance, RejectsNegativeGenerator) {
  std::vector<WindowSample> windows(3, make_window(std::vector<FrameFeature>(15, valid_frame())));
  auto bad = [] { return make_window(std::vector<FrameFeature>(15, valid_frame())); };
  EXPECT_ANY_THROW(rebalance(windows, bad, 0.5));
}

TEST(DatasetIo, RoundTripThreeRecords) {
  std::vector<SequenceRecord> records = {record("r1", 5, 2), record("r2", 3, 0, Environment::kEnv2),
                                         record("r3", 4, 4, Environment::kEnv3)};
  records[0].frames[1].pose[3] = {-0.123456789012345, 1.5e-7, 0.33};
  std::stringstream ss;
  write_dataset(records, ss);
  EXPECT_EQ(read_dataset(ss), records);
}

TEST(DatasetIo, EmotionSumRejectedWithLine) {
  std::stringstream good;
  write_dataset({record("ok", 3, 0), record("bad", 3, 0)}, good);
  std::string first, second;
  std::getline(good, first);
  std::getline(good, second);
  auto j = nlohmann::json::parse(second);
  j["frames"][2]["emotion"][3] = 0.3;  // sums to 0.9
  std::stringstream in(first + "\n" + j.dump() + "\n");
  try {
    read_dataset(in, "toy.jsonl");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("toy.jsonl:2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("emotion"), std::string::npos) << msg;
  }
}

TEST(DatasetIo, MalformedFieldNamed) {
  std::stringstream in("{\"id\":\"x\",\"env\":1,\"frames\":[{\"pose\":[],\"emotion\":[1,0,0,0,0,0,0],\"label\":0}]}\n");
  try {
    read_dataset(in, "f");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("pose"), std::string::npos) << e.what();
  }
}

TEST(DatasetIo, ClassBalance) {
  const auto b = class_balance({record("a", 10, 3), record("b", 10, 0)});
  EXPECT_EQ(b.sequences, 2u);
  EXPECT_EQ(b.frames, 20u);
  EXPECT_EQ(b.positive_frames, 3u);
  EXPECT_DOUBLE_EQ(b.positive_fraction(), 0.15);
}

TEST(Benchmark, ValidDeterministicAndMixed) {
  BenchmarkConfig cfg;
  cfg.sequences = 12;
  const auto a = make_benchmark(cfg);
  EXPECT_EQ(a, make_benchmark(cfg));
  ASSERT_EQ(a.size(), 12u);
  std::size_t with_positive = 0;
  for (const auto& r : a) {
    EXPECT_GE(r.frames.size(), cfg.min_length);
    EXPECT_LE(r.frames.size(), cfg.max_length);
    for (const auto& f : r.frames) EXPECT_FALSE(check_frame(f).has_value());
    with_positive += r.has_positive();
  }
  EXPECT_GT(with_positive, 0u);
  EXPECT_LT(with_positive, 12u);
}

TEST(Tensorize, TimeMajorLayout) {
  auto w1 = make_window(std::vector<FrameFeature>(3, valid_frame(0.1)));
  auto w2 = make_window(std::vector<FrameFeature>(3, valid_frame(0.6, 1)));
  const WindowSample* batch[] = {&w1, &w2};
  const auto all = pack_time_major(batch, 1, 2);
  ASSERT_EQ(all.shape(), (nn::Shape{4, kFrameDims}));
  EXPECT_DOUBLE_EQ(all.at(1, 0), 0.6);
  EXPECT_DOUBLE_EQ(all.at(2, 0), 0.1);
  EXPECT_DOUBLE_EQ(all.at(3, kLabelIndex), 1.0);
  const auto emo = pack_features_time_major(batch, InputMode::kEmotionOnly);
  ASSERT_EQ(emo.shape(), (nn::Shape{6, kEmotionDims}));
  EXPECT_DOUBLE_EQ(emo.at(0, 3), 0.4);
  const auto labels = pack_labels_time_major(batch);
  EXPECT_DOUBLE_EQ(labels.at(5, 0), 1.0);
  EXPECT_EQ(pack_features_time_major(batch, InputMode::kMultimodal).cols(), kFeatureDims);
}

}  // namespace
}  // namespace mint::data
