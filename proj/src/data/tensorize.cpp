// SPDX-License-Identifier: Apache-2.0
#include "mint/data/tensorize.hpp"

#include <stdexcept>

namespace mint::data {

std::size_t input_width(InputMode mode) {
  switch (mode) {
    case InputMode::kPoseOnly: return kPoseDims;
    case InputMode::kEmotionOnly: return kEmotionDims;
    case InputMode::kMultimodal: return kFeatureDims;
  }
  return 0;
}

const char* to_string(InputMode mode) {
  switch (mode) {
    case InputMode::kPoseOnly: return "pose_only";
    case InputMode::kEmotionOnly: return "emotion_only";
    case InputMode::kMultimodal: return "multimodal";
  }
  return "?";
}

InputMode input_mode_from_string(const std::string& name) {
  if (name == "pose_only") return InputMode::kPoseOnly;
  if (name == "emotion_only") return InputMode::kEmotionOnly;
  if (name == "multimodal") return InputMode::kMultimodal;
  throw std::invalid_argument("unknown input mode '" + name +
                              "' (expected pose_only, emotion_only or multimodal)");
}

namespace {

std::size_t common_length(std::span<const WindowSample* const> windows) {
  if (windows.empty()) throw std::invalid_argument("pack: empty window batch");
  const std::size_t len = windows.front()->length();
  for (const auto* w : windows) {
    if (w->length() != len) throw std::invalid_argument("pack: windows of unequal length");
  }
  return len;
}

}  // namespace

nn::Tensor pack_time_major(std::span<const WindowSample* const> windows, std::size_t first,
                           std::size_t steps) {
  const std::size_t len = common_length(windows);
  if (first + steps > len) throw std::invalid_argument("pack_time_major: frame range out of window");
  const std::size_t batch = windows.size();
  std::vector<double> v(steps * batch * kFrameDims);
  for (std::size_t t = 0; t < steps; ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      const auto flat = windows[b]->frames[first + t].flatten();
      std::copy(flat.begin(), flat.end(), v.begin() + static_cast<std::ptrdiff_t>((t * batch + b) * kFrameDims));
    }
  }
  return nn::Tensor({steps * batch, kFrameDims}, std::move(v));
}

nn::Tensor pack_features_time_major(std::span<const WindowSample* const> windows, InputMode mode) {
  const std::size_t len = common_length(windows);
  const std::size_t batch = windows.size();
  const std::size_t width = input_width(mode);
  const std::size_t begin = mode == InputMode::kEmotionOnly ? kEmotionBegin : 0;
  std::vector<double> v(len * batch * width);
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t b = 0; b < batch; ++b) {
      const auto flat = windows[b]->frames[t].flatten();
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(begin), width,
                  v.begin() + static_cast<std::ptrdiff_t>((t * batch + b) * width));
    }
  }
  return nn::Tensor({len * batch, width}, std::move(v));
}

nn::Tensor pack_labels_time_major(std::span<const WindowSample* const> windows) {
  const std::size_t len = common_length(windows);
  const std::size_t batch = windows.size();
  std::vector<double> v(len * batch);
  for (std::size_t t = 0; t < len; ++t)
    for (std::size_t b = 0; b < batch; ++b) v[t * batch + b] = windows[b]->frames[t].label;
  return nn::Tensor({len * batch, 1}, std::move(v));
}

std::vector<const WindowSample*> pointers(const std::vector<WindowSample>& windows) {
  std::vector<const WindowSample*> out;
  out.reserve(windows.size());
  for (const auto& w : windows) out.push_back(&w);
  return out;
}

}  // namespace mint::data
