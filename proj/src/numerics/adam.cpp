// SPDX-License-Identifier: Apache-2.0
#include "mint/numerics/adam.hpp"

#include <cmath>

namespace mint::nn {

void adam_update(std::span<double> param, std::span<const double> grad, AdamState& state,
                 const AdamConfig& config) {
  if (!grad.empty() && grad.size() != param.size()) {
    throw ShapeError("adam_update: gradient of " + std::to_string(grad.size()) +
                     " entries for parameter of " + std::to_string(param.size()));
  }
  if (state.first_moment.empty()) {
    state.first_moment.assign(param.size(), 0.0);
    state.second_moment.assign(param.size(), 0.0);
  } else if (state.first_moment.size() != param.size()) {
    throw ShapeError("adam_update: moment buffers do not match parameter size");
  }
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(config.beta1, t);
  const double c2 = 1.0 - std::pow(config.beta2, t);
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double g = (grad.empty() ? 0.0 : grad[i]) + config.weight_decay * param[i];
    auto& m = state.first_moment[i];
    auto& v = state.second_moment[i];
    m = config.beta1 * m + (1.0 - config.beta1) * g;
    v = config.beta2 * v + (1.0 - config.beta2) * g * g;
    param[i] -= config.learning_rate * (m / c1) / (std::sqrt(v / c2) + config.epsilon);
  }
}

Adam::Adam(ParamList params, AdamConfig config)
    : params_(std::move(params)), config_(config), states_(params_.size()) {}

void Adam::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

void Adam::step() {
  ++steps_;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    auto& t = params_[i].tensor;
    adam_update(t.mutable_values(), t.grad(), states_[i], config_);
  }
}

}  // namespace mint::nn
