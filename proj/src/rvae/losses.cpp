// SPDX-License-Identifier: Apache-2.0
#include "mint/rvae/losses.hpp"

#include <algorithm>
#include <cmath>

#include "mint/data/frame.hpp"
#include "mint/numerics/ops.hpp"

namespace mint::rvae {

using namespace mint::nn;

double huber(std::span<const double> residual, double delta) {
  if (!(delta > 0)) throw std::invalid_argument("huber: delta must be > 0");
  double sq = 0.0;
  for (double r : residual) sq += r * r;
  const double norm = std::sqrt(sq);
  return norm <= delta ? sq / (2.0 * delta) : norm - 0.5 * delta;
}

Tensor pose_loss(const Tensor& pred, const Tensor& target, double confidence_floor, double delta,
                 double coord_weight, double conf_weight) {
  if (pred.shape() != target.shape() || pred.rank() != 2 || pred.dim(1) != data::kPoseDims) {
    throw ShapeError("pose_loss: expected matching [N, 51] operands, got " +
                     to_string(pred.shape()) + " and " + to_string(target.shape()));
  }
  const std::size_t frames = pred.dim(0);
  const std::size_t joints = frames * data::kKeypoints;
  const Tensor pj = reshape(pred, {joints, 3});
  const Tensor tj = reshape(target.detach(), {joints, 3});

  std::vector<double> weight(joints);
  for (std::size_t j = 0; j < joints; ++j) weight[j] = tj[3 * j + 2] + confidence_floor;
  const Tensor residual = sub(slice(pj, 1, 0, 2), slice(tj, 1, 0, 2));
  const Tensor coord = scale(sum(mul(huber_norm(residual, delta), Tensor({joints}, std::move(weight)))),
                             1.0 / static_cast<double>(frames));
  const Tensor conf = mean(square(sub(slice(pj, 1, 2, 3), slice(tj, 1, 2, 3))));
  return add(scale(coord, coord_weight), scale(conf, conf_weight));
}

Tensor emotion_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape() || pred.rank() != 2) {
    throw ShapeError("emotion_loss: expected matching [N, C] operands, got " +
                     to_string(pred.shape()) + " and " + to_string(target.shape()));
  }
  const Tensor t = target.detach();
  // e * log e is taken as 0 at e = 0 (log is floored, and e multiplies it).
  const Tensor kl = mul(t, sub(log(t), log(pred)));
  return scale(sum(kl), 1.0 / static_cast<double>(pred.dim(0)));
}

Tensor label_loss(const Tensor& pred, const Tensor& target) {
  if (pred.shape() != target.shape()) {
    throw ShapeError("label_loss: incompatible shapes " + to_string(pred.shape()) + " and " +
                     to_string(target.shape()));
  }
  const Tensor y = target.detach();
  const Tensor one_minus_y = add_scalar(scale(y, -1.0), 1.0);
  const Tensor ll = add(mul(y, log(pred)), mul(one_minus_y, log(add_scalar(scale(pred, -1.0), 1.0))));
  return scale(mean(ll), -1.0);
}

Tensor kl_free_bits(const Tensor& mu, const Tensor& logvar, double floor) {
  if (mu.shape() != logvar.shape() || mu.rank() != 2) {
    throw ShapeError("kl_free_bits: expected matching [B, L] operands, got " +
                     to_string(mu.shape()) + " and " + to_string(logvar.shape()));
  }
  const std::size_t batch = mu.dim(0);
  // 0.5 (mu^2 + sigma^2 - log sigma^2 - 1), per entry
  const Tensor per_entry =
      scale(add_scalar(sub(add(square(mu), exp(logvar)), logvar), -1.0), 0.5);
  const Tensor per_dim = scale(sum_last(transpose(per_entry)), 1.0 / static_cast<double>(batch));
  return sum(clamp_min(per_dim, floor));
}

double beta_schedule(double epoch, double beta_max, double warmup_epochs) {
  if (epoch < 0) throw std::invalid_argument("beta_schedule: epoch must be >= 0");
  return beta_max * std::min(epoch / warmup_epochs, 1.0);
}

double teacher_forcing_probability(std::size_t epoch, std::size_t total_epochs) {
  if (total_epochs <= 1) return epoch == 0 && total_epochs == 1 ? 1.0 : 0.0;
  const double tau =
      1.0 - static_cast<double>(epoch) / static_cast<double>(total_epochs - 1);
  return std::clamp(tau, 0.0, 1.0);
}

Tensor teacher_forcing_select(const Tensor& truth, const Tensor& pred, double tau, Rng& rng) {
  if (truth.shape() != pred.shape() || truth.rank() != 2) {
    throw ShapeError("teacher_forcing_select: incompatible shapes " + to_string(truth.shape()) +
                     " and " + to_string(pred.shape()));
  }
  if (!(tau >= 0.0 && tau <= 1.0)) throw std::invalid_argument("teacher forcing tau outside [0, 1]");
  const std::size_t rows = truth.dim(0), cols = truth.dim(1);
  std::vector<double> keep(rows * cols), other(rows * cols);
  std::size_t from_truth = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double m = rng.bernoulli(tau) ? 1.0 : 0.0;
    from_truth += m > 0 ? 1 : 0;
    std::fill_n(keep.begin() + static_cast<std::ptrdiff_t>(r * cols), cols, m);
    std::fill_n(other.begin() + static_cast<std::ptrdiff_t>(r * cols), cols, 1.0 - m);
  }
  if (from_truth == rows) return truth;
  if (from_truth == 0) return pred;
  return add(mul(truth, Tensor(truth.shape(), std::move(keep))),
             mul(pred, Tensor(pred.shape(), std::move(other))));
}

Tensor compose_total(const Tensor& pose, const Tensor& emotion, const Tensor& label,
                     const Tensor& kl, const RvaeHyper& h, double beta, LossBreakdown* parts) {
  Tensor total = add(add(scale(pose, h.lambda_pose), scale(emotion, h.lambda_emotion)),
                     add(scale(label, h.lambda_label), scale(kl, beta)));
  if (parts) {
    parts->pose = pose.item();
    parts->emotion = emotion.item();
    parts->label = label.item();
    parts->kl = kl.item();
    parts->beta_used = beta;
    parts->total = total.item();
  }
  return total;
}

}  // namespace mint::rvae
