// SPDX-License-Identifier: Apache-2.0
// Shared builders for tests and the acceptance gate.
#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mint/data/frame.hpp"
#include "mint/data/windows.hpp"
#include "mint/numerics/rng.hpp"
#include "mint/rvae/hyper.hpp"

namespace mint::testing {

/// Random valid frame: coordinates ~ N(0, 1), confidences U(0, 1), emotion a
/// softmax of N(0, 1) logits.
inline data::FrameFeature random_frame(nn::Rng& rng, int label = 0) {
  data::FrameFeature f;
  for (auto& k : f.pose) k = {rng.normal(), rng.normal(), rng.uniform()};
  double total = 0.0;
  for (auto& e : f.emotion) total += (e = std::exp(rng.normal()));
  for (auto& e : f.emotion) e /= total;
  f.label = label;
  return f;
}

inline data::WindowSample random_window(nn::Rng& rng, std::size_t length,
                                        std::size_t positives_at_end = 0) {
  std::vector<data::FrameFeature> frames;
  for (std::size_t t = 0; t < length; ++t) {
    frames.push_back(random_frame(rng, t + positives_at_end >= length ? 1 : 0));
  }
  return data::make_window(std::move(frames), "random");
}

/// Windows whose frame labels are random and whose features are shifted by
/// +/-1 in every coordinate according to the label, so any per-frame linear
/// classifier can separate them.
inline std::vector<data::WindowSample> separable_windows(nn::Rng& rng, std::size_t n,
                                                         std::size_t length = data::kWindowLength) {
  std::vector<data::WindowSample> out;
  for (std::size_t w = 0; w < n; ++w) {
    std::vector<data::FrameFeature> frames;
    for (std::size_t t = 0; t < length; ++t) {
      const int label = rng.bernoulli(0.5) ? 1 : 0;
      auto f = random_frame(rng, label);
      const double shift = label ? 1.0 : -1.0;
      for (auto& k : f.pose) {
        k.x = 0.3 * k.x + shift;
        k.y = 0.3 * k.y + shift;
      }
      frames.push_back(f);
    }
    out.push_back(data::make_window(std::move(frames), "sep" + std::to_string(w)));
  }
  return out;
}

/// Narrow architecture for fast gradient checks and smoke runs.
inline rvae::RvaeHyper tiny_hyper() {
  rvae::RvaeHyper h;
  h.latent_dim = 4;
  h.mlp_dims = {8, 6, 5};
  h.encoder_hidden = 6;
  h.decoder_hidden = 6;
  h.decoder_input_dim = 5;
  h.output_hidden = 7;
  h.epochs = 3;
  h.warmup_epochs = 2;
  h.batch_size = 4;
  return h;
}

}  // namespace mint::testing
