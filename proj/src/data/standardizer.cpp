// SPDX-License-Identifier: Apache-2.0
#include "mint/data/standardizer.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

namespace mint::data {

Standardizer::Standardizer() {
  means_.fill(0.0);
  stds_.fill(1.0);
}

Standardizer::Standardizer(std::array<double, kCoordDims> means, std::array<double, kCoordDims> stds)
    : means_(means), stds_(stds) {
  for (double s : stds_) {
    if (!(s > 0.0)) throw ValidationError("Standardizer: standard deviations must be > 0");
  }
}

FrameFeature Standardizer::apply(const FrameFeature& frame) const {
  FrameFeature out = frame;
  for (std::size_t k = 0; k < kKeypoints; ++k) {
    out.pose[k].x = (frame.pose[k].x - means_[2 * k]) / stds_[2 * k];
    out.pose[k].y = (frame.pose[k].y - means_[2 * k + 1]) / stds_[2 * k + 1];
  }
  return out;
}

FrameFeature Standardizer::invert(const FrameFeature& frame) const {
  FrameFeature out = frame;
  for (std::size_t k = 0; k < kKeypoints; ++k) {
    out.pose[k].x = frame.pose[k].x * stds_[2 * k] + means_[2 * k];
    out.pose[k].y = frame.pose[k].y * stds_[2 * k + 1] + means_[2 * k + 1];
  }
  return out;
}

std::vector<SequenceRecord> Standardizer::apply(const std::vector<SequenceRecord>& records) const {
  std::vector<SequenceRecord> out = records;
  for (auto& r : out)
    for (auto& f : r.frames) f = apply(f);
  return out;
}

std::vector<SequenceRecord> Standardizer::invert(const std::vector<SequenceRecord>& records) const {
  std::vector<SequenceRecord> out = records;
  for (auto& r : out)
    for (auto& f : r.frames) f = invert(f);
  return out;
}

Standardizer fit_standardizer(std::span<const FrameFeature> frames) {
  if (frames.size() < 2) {
    throw ValidationError("fit_standardizer: need at least 2 training frames, got " +
                          std::to_string(frames.size()));
  }
  std::array<double, kCoordDims> mean{}, m2{};
  // Welford accumulation per coordinate.
  double n = 0.0;
  for (const auto& f : frames) {
    n += 1.0;
    for (std::size_t k = 0; k < kKeypoints; ++k) {
      const double v[2] = {f.pose[k].x, f.pose[k].y};
      for (std::size_t a = 0; a < 2; ++a) {
        const std::size_t i = 2 * k + a;
        const double d = v[a] - mean[i];
        mean[i] += d / n;
        m2[i] += d * (v[a] - mean[i]);
      }
    }
  }
  std::array<double, kCoordDims> stds{};
  for (std::size_t i = 0; i < kCoordDims; ++i) {
    stds[i] = std::max(std::sqrt(m2[i] / n), kStdFloor);
  }
  return Standardizer(mean, stds);
}

Standardizer fit_standardizer(const std::vector<SequenceRecord>& records) {
  std::vector<FrameFeature> frames;
  for (const auto& r : records) frames.insert(frames.end(), r.frames.begin(), r.frames.end());
  return fit_standardizer(std::span<const FrameFeature>(frames));
}

void to_json(nlohmann::json& j, const Standardizer& s) {
  j = {{"means", s.means()}, {"stds", s.stds()}};
}

void from_json(const nlohmann::json& j, Standardizer& s) {
  s = Standardizer(j.at("means").get<std::array<double, kCoordDims>>(),
                   j.at("stds").get<std::array<double, kCoordDims>>());
}

void save_standardizer(const Standardizer& s, const std::string& path) {
  const nlohmann::json j = s;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump() << '\n';
}

Standardizer load_standardizer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  nlohmann::json j;
  try {
    in >> j;
    return j.get<Standardizer>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(path + ": malformed standardizer: " + e.what());
  }
}

}  // namespace mint::data
