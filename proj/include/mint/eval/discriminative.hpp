// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mint/data/windows.hpp"
#include "mint/numerics/rng.hpp"

namespace mint::eval {

struct DiscriminativeOptions {
  std::size_t hidden = 32;
  std::size_t epochs = 30;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double train_fraction = 0.8;
};

struct DiscriminativeResult {
  double accuracy = 0.0;
  double score = 0.0;  // |0.5 - accuracy|
  std::size_t train_size = 0;
  std::size_t test_size = 0;
};

/// Trains a single-layer GRU (sigmoid head on the final state) to tell real
/// from synthetic windows on a per-class 80/20 split and reports held-out
/// accuracy. All 59 channels are used.
DiscriminativeResult discriminative_score(const std::vector<data::WindowSample>& real,
                                          const std::vector<data::WindowSample>& synthetic,
                                          nn::Rng& rng, const DiscriminativeOptions& options = {});

}  // namespace mint::eval
