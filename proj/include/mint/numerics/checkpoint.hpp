// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <string>

#include "mint/numerics/adam.hpp"
#include "mint/numerics/layers.hpp"

namespace mint::nn {

/// Raised when a checkpoint does not match the model it is loaded into.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A checkpoint is one JSON document:
//   {"kind": ..., "hyper": {...}, "params": [{"name", "shape", "values"}],
//    "buffers": [{"name", "values"}], ...caller extras}
// Doubles round-trip exactly, so a reloaded model reproduces outputs bit for
// bit.

nlohmann::json tensors_to_json(const ParamList& params);
nlohmann::json buffers_to_json(const BufferList& buffers);

/// Copies stored values into `params` / `buffers`; names, order and shapes
/// must match exactly.
void tensors_from_json(const nlohmann::json& j, ParamList& params);
void buffers_from_json(const nlohmann::json& j, BufferList& buffers);

void write_json_file(const nlohmann::json& j, const std::string& path);
nlohmann::json read_json_file(const std::string& path);

}  // namespace mint::nn
