// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <json.hpp>
#include <span>
#include <string>
#include <vector>

#include "mint/data/frame.hpp"

namespace mint::data {

/// Floor applied to fitted standard deviations of constant coordinates.
inline constexpr double kStdFloor = 1e-6;

/// z-normalization of the 34 box-normalized pose coordinates. Confidences,
/// emotions and labels pass through untouched.
class Standardizer {
 public:
  Standardizer();
  Standardizer(std::array<double, kCoordDims> means, std::array<double, kCoordDims> stds);

  const std::array<double, kCoordDims>& means() const { return means_; }
  const std::array<double, kCoordDims>& stds() const { return stds_; }

  FrameFeature apply(const FrameFeature& frame) const;
  FrameFeature invert(const FrameFeature& frame) const;
  std::vector<SequenceRecord> apply(const std::vector<SequenceRecord>& records) const;
  std::vector<SequenceRecord> invert(const std::vector<SequenceRecord>& records) const;

  bool operator==(const Standardizer&) const = default;

 private:
  std::array<double, kCoordDims> means_;
  std::array<double, kCoordDims> stds_;
};

/// Coordinate order follows the flattened pose: x1, y1, x2, y2, ...
Standardizer fit_standardizer(std::span<const FrameFeature> train_frames);
Standardizer fit_standardizer(const std::vector<SequenceRecord>& train_records);

void to_json(nlohmann::json& j, const Standardizer& s);
void from_json(const nlohmann::json& j, Standardizer& s);

void save_standardizer(const Standardizer& s, const std::string& path);
Standardizer load_standardizer(const std::string& path);

}  // namespace mint::data
