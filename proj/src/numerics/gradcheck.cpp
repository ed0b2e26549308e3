// SPDX-License-Identifier: Apache-2.0
#include "mint/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "mint/numerics/rng.hpp"

namespace mint::nn {

double grad_check(const std::function<Tensor()>& loss_fn, std::span<Tensor> params,
                  const GradCheckOptions& options) {
  if (!(options.fd_step > 0)) throw std::invalid_argument("grad_check: fd_step must be > 0");
  for (auto& p : params) p.zero_grad();
  loss_fn().backward();

  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (auto& p : params) {
    if (p.has_grad()) {
      analytic.emplace_back(p.grad().begin(), p.grad().end());
    } else {
      analytic.emplace_back(p.numel(), 0.0);
    }
  }

  Rng rng(options.seed);
  double worst = 0.0;
  const double h = options.fd_step;
  for (std::size_t t = 0; t < params.size(); ++t) {
    auto values = params[t].mutable_values();
    std::vector<std::size_t> coords(values.size());
    std::iota(coords.begin(), coords.end(), std::size_t{0});
    if (options.max_coords_per_tensor > 0 && coords.size() > options.max_coords_per_tensor) {
      rng.shuffle(std::span<std::size_t>(coords));
      coords.resize(options.max_coords_per_tensor);
    }
    for (auto i : coords) {
      const double saved = values[i];
      values[i] = saved + h;
      const double up = loss_fn().item();
      values[i] = saved - h;
      const double down = loss_fn().item();
      values[i] = saved;
      const double fd = (up - down) / (2.0 * h);
      const double a = analytic[t][i];
      const double err = std::abs(a - fd) / std::max({1.0, std::abs(a), std::abs(fd)});
      worst = std::max(worst, err);
    }
  }
  return worst;
}

}  // namespace mint::nn
