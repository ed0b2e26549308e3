// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <json.hpp>

namespace mint::rvae {

/// Hyperparameters of the multimodal recurrent VAE. Defaults are the
/// full-scale training settings.
struct RvaeHyper {
  // Loss weights.
  double lambda_pose = 20.0;
  double lambda_emotion = 10.0;
  double lambda_label = 1.0;
  double beta_max = 0.8;
  double warmup_epochs = 5000.0;  // E_warm
  double free_bits = 0.1;         // per-dimension KL floor
  double confidence_floor = 0.1;  // added to keypoint confidence in the pose weight
  double huber_delta = 1.0;
  double pose_coord_weight = 0.8;
  double pose_conf_weight = 0.2;

  // Architecture.
  std::size_t latent_dim = 32;
  std::array<std::size_t, 3> mlp_dims{256, 128, 64};
  std::size_t encoder_hidden = 128;
  std::size_t decoder_hidden = 128;
  std::size_t decoder_input_dim = 64;  // projection of the fed-back frame
  std::size_t output_hidden = 128;
  double dropout = 0.2;

  // Optimization.
  std::size_t batch_size = 64;
  std::size_t epochs = 700;
  double learning_rate = 1e-3;
  double weight_decay = 1e-5;

  /// Multiplies epochs and warm-up length, keeping the schedule shapes.
  RvaeHyper scaled(double factor) const;
  /// Throws std::invalid_argument on a violated constraint.
  void validate() const;
};

void to_json(nlohmann::json& j, const RvaeHyper& h);
void from_json(const nlohmann::json& j, RvaeHyper& h);

}  // namespace mint::rvae
