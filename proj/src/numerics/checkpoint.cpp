// SPDX-License-Identifier: Apache-2.0
#include "mint/numerics/checkpoint.hpp"

#include <algorithm>
#include <fstream>

namespace mint::nn {

using nlohmann::json;

json tensors_to_json(const ParamList& params) {
  json arr = json::array();
  for (const auto& p : params) {
    arr.push_back({{"name", p.name},
                   {"shape", p.tensor.shape()},
                   {"values", std::vector<double>(p.tensor.values().begin(), p.tensor.values().end())}});
  }
  return arr;
}

json buffers_to_json(const BufferList& buffers) {
  json arr = json::array();
  for (const auto& b : buffers) arr.push_back({{"name", b.name}, {"values", *b.data}});
  return arr;
}

void tensors_from_json(const json& j, ParamList& params) {
  if (!j.is_array() || j.size() != params.size()) {
    throw CheckpointError("checkpoint holds " + std::to_string(j.is_array() ? j.size() : 0) +
                          " parameter tensors, model expects " + std::to_string(params.size()));
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    const auto& e = j[i];
    const auto name = e.at("name").get<std::string>();
    if (name != params[i].name) {
      throw CheckpointError("checkpoint tensor " + std::to_string(i) + " is '" + name +
                            "', model expects '" + params[i].name + "'");
    }
    const auto shape = e.at("shape").get<Shape>();
    if (shape != params[i].tensor.shape()) {
      throw CheckpointError("tensor '" + name + "' has shape " + to_string(shape) +
                            ", model expects " + to_string(params[i].tensor.shape()));
    }
    const auto values = e.at("values").get<std::vector<double>>();
    if (values.size() != params[i].tensor.numel()) {
      throw CheckpointError("tensor '" + name + "' has the wrong number of values");
    }
    std::copy(values.begin(), values.end(), params[i].tensor.mutable_values().begin());
  }
}

void buffers_from_json(const json& j, BufferList& buffers) {
  if (!j.is_array() || j.size() != buffers.size()) {
    throw CheckpointError("checkpoint buffer count does not match the model");
  }
  for (std::size_t i = 0; i < buffers.size(); ++i) {
    const auto name = j[i].at("name").get<std::string>();
    auto values = j[i].at("values").get<std::vector<double>>();
    if (name != buffers[i].name || values.size() != buffers[i].data->size()) {
      throw CheckpointError("checkpoint buffer '" + name + "' does not match '" + buffers[i].name + "'");
    }
    *buffers[i].data = std::move(values);
  }
}

void write_json_file(const json& j, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << j.dump() << '\n';
  if (!out) throw std::runtime_error("write failed for " + path);
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw CheckpointError(path + ": " + e.what());
  }
}

}  // namespace mint::nn
