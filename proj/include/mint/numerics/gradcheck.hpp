// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include "mint/numerics/tensor.hpp"

namespace mint::nn {

struct GradCheckOptions {
  double fd_step = 1e-5;
  /// Coordinates probed per parameter tensor; 0 probes every coordinate.
  std::size_t max_coords_per_tensor = 0;
  std::uint64_t seed = 0;  // picks the probed coordinates
};

/// Compares reverse-mode gradients of `loss_fn` against central finite
/// differences and returns max |analytic - fd| / max(1, |analytic|, |fd|).
/// `loss_fn` must rebuild the graph from the current parameter values and be
/// deterministic.
double grad_check(const std::function<Tensor()>& loss_fn, std::span<Tensor> params,
                  const GradCheckOptions& options = {});

}  // namespace mint::nn
