// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>

#include "mint/numerics/rng.hpp"
#include "mint/numerics/tensor.hpp"
#include "mint/rvae/hyper.hpp"

namespace mint::rvae {

using nn::Tensor;

/// Scalar Huber on the Euclidean norm of r: |r|^2/(2 delta) inside the
/// threshold, |r| - delta/2 outside.
double huber(std::span<const double> residual, double delta);

/// Pose reconstruction loss over N predicted frames, pose blocks [N, 51]:
///   coord_weight * (1/N) sum_frames sum_joints (c + nu) * huber(p_hat - p)
/// + conf_weight  * MSE(c_hat, c)
/// where c are the target confidences and the Huber acts on each joint's 2-D
/// coordinate residual.
Tensor pose_loss(const Tensor& pred_pose, const Tensor& target_pose, double confidence_floor,
                 double delta, double coord_weight = 0.8, double conf_weight = 0.2);

/// Mean over frames of KL(target || pred) for [N, 7] distributions; target
/// zeros contribute nothing.
Tensor emotion_loss(const Tensor& pred_emotion, const Tensor& target_emotion);

/// Mean binary cross-entropy of probabilities pred [N, 1] against 0/1 targets.
Tensor label_loss(const Tensor& pred_label, const Tensor& target_label);

/// Per-dimension Gaussian KL to N(0, I), averaged over the batch, each
/// dimension clamped from below at `floor`, then summed. mu, logvar: [B, L].
Tensor kl_free_bits(const Tensor& mu, const Tensor& logvar, double floor);

/// beta_max * min(epoch / warmup, 1).
double beta_schedule(double epoch, double beta_max, double warmup_epochs);

/// Linear anneal from 1 at epoch 0 to 0 at the last epoch, clamped to [0, 1].
double teacher_forcing_probability(std::size_t epoch, std::size_t total_epochs);

/// Per-row choice between ground truth (probability tau) and prediction.
/// truth, pred: [B, D].
Tensor teacher_forcing_select(const Tensor& truth, const Tensor& pred, double tau, nn::Rng& rng);

struct LossBreakdown {
  double pose = 0.0;
  double emotion = 0.0;
  double label = 0.0;
  double kl = 0.0;
  double total = 0.0;
  double beta_used = 0.0;
  double tau_used = 0.0;
};

/// Weighted composition; returns the differentiable total and fills `parts`.
Tensor compose_total(const Tensor& pose, const Tensor& emotion, const Tensor& label,
                     const Tensor& kl, const RvaeHyper& hyper, double beta,
                     LossBreakdown* parts = nullptr);

}  // namespace mint::rvae
