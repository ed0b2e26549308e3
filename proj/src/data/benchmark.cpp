// SPDX-License-Identifier: Apache-2.0
#include "mint/data/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "mint/numerics/rng.hpp"

namespace mint::data {
namespace {

// COCO-17 order: nose, eyes, ears, shoulders, elbows, wrists, hips, knees, ankles.
constexpr double kTemplate[kKeypoints][2] = {
    {0.50, 0.08}, {0.47, 0.06}, {0.53, 0.06}, {0.44, 0.07}, {0.56, 0.07}, {0.35, 0.22},
    {0.65, 0.22}, {0.30, 0.38}, {0.70, 0.38}, {0.28, 0.52}, {0.72, 0.52}, {0.40, 0.55},
    {0.60, 0.55}, {0.40, 0.75}, {0.60, 0.75}, {0.40, 0.95}, {0.60, 0.95}};

constexpr std::size_t kRightElbow = 8, kRightWrist = 10;
constexpr std::size_t kHappy = 3, kNeutral = 6;

double ramp(double t, double start, double length) {
  return std::clamp((t - start) / length, 0.0, 1.0);
}

}  // namespace

std::vector<SequenceRecord> make_benchmark(const BenchmarkConfig& cfg) {
  if (cfg.min_length == 0 || cfg.max_length < cfg.min_length) {
    throw std::invalid_argument("make_benchmark: invalid length range");
  }
  nn::Rng rng(cfg.seed);
  std::vector<SequenceRecord> records;
  records.reserve(cfg.sequences);
  const auto positives = static_cast<std::size_t>(
      std::lround(cfg.positive_sequence_fraction * static_cast<double>(cfg.sequences)));

  for (std::size_t s = 0; s < cfg.sequences; ++s) {
    const bool positive = s < positives;
    const std::size_t n = cfg.min_length + rng.index(cfg.max_length - cfg.min_length + 1);

    double offset[kKeypoints][2];
    double base_conf[kKeypoints];
    for (std::size_t k = 0; k < kKeypoints; ++k) {
      offset[k][0] = rng.normal(0.0, 0.02);
      offset[k][1] = rng.normal(0.0, 0.02);
      base_conf[k] = rng.uniform(0.6, 1.0);
    }
    std::array<double, kEmotionDims> emo_bias{};
    for (auto& b : emo_bias) b = rng.normal(0.0, 0.5);
    const double gait_freq = rng.uniform(0.25, 0.45);
    const double gait_phase = rng.uniform(0.0, 2.0 * std::numbers::pi);

    double onset = static_cast<double>(n) + 1.0;
    if (positive) {
      onset = std::floor(rng.uniform(cfg.onset_min_fraction, cfg.onset_max_fraction) *
                         static_cast<double>(n));
    }
    // Distractor: a partial arm raise that comes and goes.
    double d_start = -1.0, d_len = 0.0;
    if (!positive && rng.bernoulli(cfg.distractor_probability)) {
      d_len = rng.uniform(8.0, 14.0);
      d_start = rng.uniform(0.0, static_cast<double>(n) - d_len);
    }

    SequenceRecord rec;
    std::ostringstream id;
    id << cfg.id_prefix << "-e" << to_int(cfg.env) << '-' << std::setw(4) << std::setfill('0') << s;
    rec.id = id.str();
    rec.env = cfg.env;
    rec.frames.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
      const double tt = static_cast<double>(t);
      // The cue starts a few frames before the annotated onset.
      const double intent = positive ? ramp(tt, onset - 6.0, 10.0) : 0.0;
      double distract = 0.0;
      if (d_start >= 0.0 && tt >= d_start && tt <= d_start + d_len) {
        distract = 0.5 * std::sin(std::numbers::pi * (tt - d_start) / d_len);
      }
      const double lift = cfg.signal_strength * (intent + distract);
      const double gait = std::sin(gait_freq * tt + gait_phase);

      FrameFeature f;
      for (std::size_t k = 0; k < kKeypoints; ++k) {
        double x = kTemplate[k][0] + offset[k][0];
        double y = kTemplate[k][1] + offset[k][1];
        if (k >= 13) y += (k % 2 ? 0.03 : -0.03) * gait;
        if (k >= 13) x += (k % 2 ? 0.02 : -0.02) * gait;
        if (k == kRightWrist) y -= 0.25 * lift;
        if (k == kRightElbow) y -= 0.12 * lift;
        if (k <= 4) x += 0.03 * cfg.signal_strength * intent;
        x += rng.normal(0.0, cfg.noise);
        y += rng.normal(0.0, cfg.noise);
        double c = std::clamp(base_conf[k] + rng.normal(0.0, 0.05), 0.0, 1.0);
        if (rng.bernoulli(cfg.dropout_probability)) x = y = c = 0.0;
        f.pose[k] = {x, y, c};
      }
      std::array<double, kEmotionDims> logits{};
      for (std::size_t e = 0; e < kEmotionDims; ++e) logits[e] = emo_bias[e] + rng.normal(0.0, 0.3);
      logits[kNeutral] += 2.0;
      logits[kHappy] += 0.5 + 0.8 * cfg.emotion_strength * intent;
      const double mx = *std::max_element(logits.begin(), logits.end());
      double z = 0.0;
      for (std::size_t e = 0; e < kEmotionDims; ++e) z += (f.emotion[e] = std::exp(logits[e] - mx));
      for (auto& p : f.emotion) p /= z;
      f.label = tt >= onset ? 1 : 0;
      rec.frames.push_back(f);
    }
    records.push_back(std::move(rec));
  }
  // Interleave classes so prefixes of the list are not single-class.
  rng.shuffle(std::span<SequenceRecord>(records));
  return records;
}

}  // namespace mint::data
