// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "mint/data/windows.hpp"
#include "mint/numerics/tensor.hpp"

namespace mint::data {

/// Which feature blocks of a frame a model consumes.
enum class InputMode { kPoseOnly, kEmotionOnly, kMultimodal };

std::size_t input_width(InputMode mode);
const char* to_string(InputMode mode);
InputMode input_mode_from_string(const std::string& name);

/// Frames [first, first + steps) of each window as time-major rows
/// (row = t * batch + b), all 59 columns.
nn::Tensor pack_time_major(std::span<const WindowSample* const> windows, std::size_t first,
                           std::size_t steps);

/// Feature columns selected by `mode` (label stripped), time-major.
nn::Tensor pack_features_time_major(std::span<const WindowSample* const> windows, InputMode mode);

/// Frame labels, time-major [T * B, 1].
nn::Tensor pack_labels_time_major(std::span<const WindowSample* const> windows);

std::vector<const WindowSample*> pointers(const std::vector<WindowSample>& windows);

}  // namespace mint::data
