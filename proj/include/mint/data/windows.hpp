// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <string>
#include <vector>

#include "mint/data/frame.hpp"

namespace mint::data {

inline constexpr std::size_t kWindowLength = 15;
/// A window is labeled positive when at least this many of its frames are.
inline constexpr std::size_t kMinPositiveFrames = 7;
inline constexpr std::size_t kDefaultStride = 5;

/// Ground-truth window rule: positive iff >= min_positive frames carry label
/// 1, wherever they fall in the window.
int window_label_from_frames(std::span<const int> labels,
                             std::size_t min_positive = kMinPositiveFrames);
int window_label_from_frames(std::span<const FrameFeature> frames,
                             std::size_t min_positive = kMinPositiveFrames);

struct WindowSample {
  std::vector<FrameFeature> frames;
  std::string record_id;
  std::size_t start = 0;
  int window_label = 0;

  bool operator==(const WindowSample&) const = default;

  std::size_t length() const { return frames.size(); }
  /// Frames 1..T-1, fed to the autoencoder.
  std::span<const FrameFeature> input_view() const;
  /// Frames 2..T, the next-step targets.
  std::span<const FrameFeature> target_view() const;
};

WindowSample make_window(std::vector<FrameFeature> frames, std::string record_id = {},
                         std::size_t start = 0);

struct WindowSet {
  std::vector<WindowSample> windows;
  std::size_t skipped_records = 0;  // shorter than the window length
};

/// Sliding windows at starts 0, stride, 2*stride, ... that fit in each record.
WindowSet window_sequences(const std::vector<SequenceRecord>& records,
                           std::size_t length = kWindowLength, std::size_t stride = kDefaultStride);

std::size_t count_positive_windows(const std::vector<WindowSample>& windows);

}  // namespace mint::data
