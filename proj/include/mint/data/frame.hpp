// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mint::data {

inline constexpr std::size_t kKeypoints = 17;
inline constexpr std::size_t kPoseDims = 3 * kKeypoints;  // x, y, confidence per keypoint
inline constexpr std::size_t kCoordDims = 2 * kKeypoints;
inline constexpr std::size_t kEmotionDims = 7;
inline constexpr std::size_t kFeatureDims = kPoseDims + kEmotionDims;  // detector input
inline constexpr std::size_t kFrameDims = kFeatureDims + 1;            // + label
inline constexpr std::size_t kLabelIndex = kFeatureDims;

/// Offsets of the three modality blocks inside a flattened frame.
inline constexpr std::size_t kPoseBegin = 0;
inline constexpr std::size_t kEmotionBegin = kPoseDims;

/// Raised when a frame, record or file violates the dataset invariants.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Environment { kEnv1 = 1, kEnv2 = 2, kEnv3 = 3 };

Environment environment_from_int(int env);
inline int to_int(Environment env) { return static_cast<int>(env); }

struct Keypoint {
  double x = 0.0;
  double y = 0.0;
  double c = 0.0;  // detector confidence in [0, 1]
  bool operator==(const Keypoint&) const = default;
};

/// One multimodal frame: pose (box-normalized, optionally standardized
/// coordinates), emotion distribution, and intent label.
struct FrameFeature {
  std::array<Keypoint, kKeypoints> pose{};
  std::array<double, kEmotionDims> emotion{};
  int label = 0;

  bool operator==(const FrameFeature&) const = default;

  /// [x1, y1, c1, ..., x17, y17, c17, e1..e7, label].
  std::array<double, kFrameDims> flatten() const;
  static FrameFeature unflatten(std::span<const double> values);
};

/// Description of the first violated invariant, or nullopt if valid.
std::optional<std::string> check_frame(const FrameFeature& frame);
void validate_frame(const FrameFeature& frame);

struct BoundingBox {
  double x_min = 0.0, y_min = 0.0, width = 0.0, height = 0.0;
};

/// Upstream detector output for one person in one frame.
struct RawFrame {
  std::array<Keypoint, kKeypoints> pose_px{};
  BoundingBox bbox;
  std::array<double, kEmotionDims> emotion{};
  int label = 0;
};

/// Maps pixel keypoints into the person box: ((x - x_min)/w, (y - y_min)/h).
/// Confidences, emotion and label are copied unchanged.
FrameFeature normalize_pose(const RawFrame& raw);

struct SequenceRecord {
  std::string id;
  Environment env = Environment::kEnv1;
  std::vector<FrameFeature> frames;

  bool operator==(const SequenceRecord&) const = default;

  /// First frame index with label 1.
  std::optional<std::size_t> onset_index() const;
  bool has_positive() const { return onset_index().has_value(); }
  std::size_t positive_frames() const;
};

}  // namespace mint::data
