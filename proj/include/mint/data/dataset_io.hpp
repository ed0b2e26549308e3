// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mint/data/frame.hpp"
#include "mint/data/windows.hpp"

namespace mint::data {

// Dataset files are JSON Lines, one sequence per line:
//   {"id": "...", "env": 1, "frames": [{"pose": [[x, y, c] x17],
//                                       "emotion": [7 floats], "label": 0|1}, ...]}
// Pose is box-normalized and not standardized. Doubles are written in
// shortest round-trip form, so load(save(x)) == x exactly.

std::vector<SequenceRecord> read_dataset(std::istream& in, const std::string& source = "<stream>");
void write_dataset(const std::vector<SequenceRecord>& records, std::ostream& out);

std::vector<SequenceRecord> load_dataset(const std::string& path);
void save_dataset(const std::vector<SequenceRecord>& records, const std::string& path);

/// Wraps windows as standalone records (id "<prefix>-<n>").
std::vector<SequenceRecord> windows_as_records(const std::vector<WindowSample>& windows,
                                               const std::string& prefix, Environment env);

struct ClassBalance {
  std::size_t sequences = 0;
  std::size_t frames = 0;
  std::size_t positive_frames = 0;
  double positive_fraction() const {
    return frames ? static_cast<double>(positive_frames) / static_cast<double>(frames) : 0.0;
  }
};

ClassBalance class_balance(const std::vector<SequenceRecord>& records);

}  // namespace mint::data
