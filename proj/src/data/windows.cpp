// SPDX-License-Identifier: Apache-2.0
#include "mint/data/windows.hpp"

#include <algorithm>

namespace mint::data {

int window_label_from_frames(std::span<const int> labels, std::size_t min_positive) {
  const auto positives = std::count(labels.begin(), labels.end(), 1);
  return static_cast<std::size_t>(positives) >= min_positive ? 1 : 0;
}

int window_label_from_frames(std::span<const FrameFeature> frames, std::size_t min_positive) {
  std::size_t positives = 0;
  for (const auto& f : frames) positives += f.label == 1 ? 1 : 0;
  return positives >= min_positive ? 1 : 0;
}

std::span<const FrameFeature> WindowSample::input_view() const {
  return std::span<const FrameFeature>(frames).first(frames.empty() ? 0 : frames.size() - 1);
}

std::span<const FrameFeature> WindowSample::target_view() const {
  return std::span<const FrameFeature>(frames).subspan(frames.empty() ? 0 : 1);
}

WindowSample make_window(std::vector<FrameFeature> frames, std::string record_id, std::size_t start) {
  WindowSample w;
  w.window_label = window_label_from_frames(std::span<const FrameFeature>(frames));
  w.frames = std::move(frames);
  w.record_id = std::move(record_id);
  w.start = start;
  return w;
}

WindowSet window_sequences(const std::vector<SequenceRecord>& records, std::size_t length,
                           std::size_t stride) {
  if (length < 2) throw std::invalid_argument("window_sequences: window length must be >= 2");
  if (stride == 0) throw std::invalid_argument("window_sequences: stride must be > 0");
  WindowSet set;
  for (const auto& r : records) {
    if (r.frames.size() < length) {
      ++set.skipped_records;
      continue;
    }
    for (std::size_t s = 0; s + length <= r.frames.size(); s += stride) {
      set.windows.push_back(make_window(
          std::vector<FrameFeature>(r.frames.begin() + static_cast<std::ptrdiff_t>(s),
                                    r.frames.begin() + static_cast<std::ptrdiff_t>(s + length)),
          r.id, s));
    }
  }
  return set;
}

std::size_t count_positive_windows(const std::vector<WindowSample>& windows) {
  return static_cast<std::size_t>(std::count_if(
      windows.begin(), windows.end(), [](const WindowSample& w) { return w.window_label == 1; }));
}

}  // namespace mint::data
