// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "mint/numerics/tensor.hpp"

namespace mint::nn {

struct AdamConfig {
  double learning_rate = 1e-3;
  double weight_decay = 0.0;  // classic L2, added to the gradient
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::int64_t step = 0;
};

/// One bias-corrected Adam update of `param` in place. Moment buffers are
/// zero-initialized on the first call.
void adam_update(std::span<double> param, std::span<const double> grad, AdamState& state,
                 const AdamConfig& config);

struct NamedParam {
  std::string name;
  Tensor tensor;
};
using ParamList = std::vector<NamedParam>;

/// Adam over a fixed parameter list; parameters without a gradient this step
/// are treated as having a zero gradient.
class Adam {
 public:
  Adam(ParamList params, AdamConfig config);

  void zero_grad();
  void step();
  std::int64_t steps() const { return steps_; }
  const AdamConfig& config() const { return config_; }

 private:
  ParamList params_;
  AdamConfig config_;
  std::vector<AdamState> states_;
  std::int64_t steps_ = 0;
};

}  // namespace mint::nn
