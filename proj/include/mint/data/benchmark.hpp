// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mint/data/frame.hpp"

namespace mint::data {

/// Procedural stand-in for recorded approach sequences, used by tests, the
/// acceptance suite and the CLI demo when no recorded dataset is at hand.
///
/// Each sequence is a person walking in view (COCO-17 skeleton in box
/// coordinates, gait oscillation, detector jitter, occasional dropped
/// keypoints). Positive sequences switch to intent at an onset frame and stay
/// positive; around the onset the right arm rises and the head turns, and the
/// emotion distribution drifts toward "happy". Some negative sequences carry
/// a brief distractor arm movement.
struct BenchmarkConfig {
  std::size_t sequences = 40;
  std::size_t min_length = 80;
  std::size_t max_length = 140;
  double positive_sequence_fraction = 0.6;
  double onset_min_fraction = 0.35;  // onset position as a fraction of length
  double onset_max_fraction = 0.65;
  double signal_strength = 1.0;      // scales the pose intent cue
  double emotion_strength = 1.0;     // scales the emotion intent cue
  double noise = 0.015;                // per-coordinate jitter (box units)
  double distractor_probability = 0.4;
  double dropout_probability = 0.02;  // per keypoint and frame
  Environment env = Environment::kEnv1;
  std::string id_prefix = "bench";
  std::uint64_t seed = 1;
};

std::vector<SequenceRecord> make_benchmark(const BenchmarkConfig& config);

}  // namespace mint::data
