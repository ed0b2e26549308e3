// SPDX-License-Identifier: Apache-2.0
#include "mint/data/frame.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mint::data {

Environment environment_from_int(int env) {
  if (env < 1 || env > 3) {
    throw ValidationError("environment must be 1, 2 or 3, got " + std::to_string(env));
  }
  return static_cast<Environment>(env);
}

std::array<double, kFrameDims> FrameFeature::flatten() const {
  std::array<double, kFrameDims> out{};
  for (std::size_t k = 0; k < kKeypoints; ++k) {
    out[3 * k] = pose[k].x;
    out[3 * k + 1] = pose[k].y;
    out[3 * k + 2] = pose[k].c;
  }
  for (std::size_t e = 0; e < kEmotionDims; ++e) out[kEmotionBegin + e] = emotion[e];
  out[kLabelIndex] = static_cast<double>(label);
  return out;
}

FrameFeature FrameFeature::unflatten(std::span<const double> values) {
  if (values.size() != kFrameDims) {
    throw ValidationError("frame must have " + std::to_string(kFrameDims) + " values, got " +
                          std::to_string(values.size()));
  }
  FrameFeature f;
  for (std::size_t k = 0; k < kKeypoints; ++k) {
    f.pose[k] = {values[3 * k], values[3 * k + 1], values[3 * k + 2]};
  }
  for (std::size_t e = 0; e < kEmotionDims; ++e) f.emotion[e] = values[kEmotionBegin + e];
  f.label = values[kLabelIndex] >= 0.5 ? 1 : 0;
  return f;
}

std::optional<std::string> check_frame(const FrameFeature& frame) {
  std::ostringstream os;
  for (std::size_t k = 0; k < kKeypoints; ++k) {
    const auto& kp = frame.pose[k];
    if (!std::isfinite(kp.x) || !std::isfinite(kp.y)) {
      os << "pose[" << k << "] coordinate is not finite";
      return os.str();
    }
    if (!(kp.c >= 0.0 && kp.c <= 1.0)) {
      os << "pose[" << k << "] confidence " << kp.c << " outside [0, 1]";
      return os.str();
    }
  }
  double total = 0.0;
  for (std::size_t e = 0; e < kEmotionDims; ++e) {
    if (!(frame.emotion[e] >= 0.0)) {
      os << "emotion[" << e << "] = " << frame.emotion[e] << " is negative";
      return os.str();
    }
    total += frame.emotion[e];
  }
  if (std::abs(total - 1.0) > 1e-6) {
    os << "emotion sums to " << total << ", expected 1";
    return os.str();
  }
  if (frame.label != 0 && frame.label != 1) {
    os << "label " << frame.label << " is not 0 or 1";
    return os.str();
  }
  return std::nullopt;
}

void validate_frame(const FrameFeature& frame) {
  if (auto err = check_frame(frame)) throw ValidationError(*err);
}

FrameFeature normalize_pose(const RawFrame& raw) {
  const auto& b = raw.bbox;
  if (!(b.width > 0.0) || !(b.height > 0.0)) {
    std::ostringstream os;
    os << "normalize_pose: bounding box has non-positive size " << b.width << " x " << b.height;
    throw ValidationError(os.str());
  }
  FrameFeature f;
  for (std::size_t k = 0; k < kKeypoints; ++k) {
    const auto& p = raw.pose_px[k];
    f.pose[k] = {(p.x - b.x_min) / b.width, (p.y - b.y_min) / b.height, p.c};
  }
  f.emotion = raw.emotion;
  f.label = raw.label;
  return f;
}

std::optional<std::size_t> SequenceRecord::onset_index() const {
  for (std::size_t k = 0; k < frames.size(); ++k) {
    if (frames[k].label == 1) return k;
  }
  return std::nullopt;
}

std::size_t SequenceRecord::positive_frames() const {
  return static_cast<std::size_t>(std::count_if(
      frames.begin(), frames.end(), [](const FrameFeature& f) { return f.label == 1; }));
}

}  // namespace mint::data
