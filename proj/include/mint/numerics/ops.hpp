// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mint/numerics/rng.hpp"
#include "mint/numerics/tensor.hpp"

// Differentiable primitives. Shapes are explicit: there is no implicit
// broadcasting, and every mismatch raises ShapeError naming the op and both
// shapes.
namespace mint::nn {

/// Floor applied inside log() so exact zeros stay finite.
inline constexpr double kLogFloor = 1e-12;

// Linear algebra
Tensor matmul(const Tensor& a, const Tensor& b);  // [m,k] x [k,n]
Tensor bmm(const Tensor& a, const Tensor& b);     // [B,m,k] x [B,k,n]
Tensor transpose(const Tensor& a);                // 2-D
Tensor permute(const Tensor& a, const std::vector<std::size_t>& axes);
Tensor reshape(const Tensor& a, Shape shape);

// Elementwise, identical shapes
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);
Tensor add_scalar(const Tensor& a, double s);
/// a[..., n] + b[n], the bias broadcast spelled out.
Tensor add_bias(const Tensor& a, const Tensor& b);
/// a[..., n] * g[n].
Tensor mul_rowvec(const Tensor& a, const Tensor& g);

// Layout
Tensor concat(const std::vector<Tensor>& parts, std::size_t axis);
Tensor slice(const Tensor& a, std::size_t axis, std::size_t begin, std::size_t end);

// Nonlinearities
Tensor sigmoid(const Tensor& a);
Tensor tanh(const Tensor& a);
Tensor relu(const Tensor& a);
Tensor exp(const Tensor& a);
/// log(max(x, kLogFloor)); the gradient is zero where the floor is active.
Tensor log(const Tensor& a);
Tensor square(const Tensor& a);
/// max(x, floor) elementwise.
Tensor clamp_min(const Tensor& a, double floor);
/// Softmax over the last axis.
Tensor softmax(const Tensor& a);

// Reductions
Tensor sum(const Tensor& a);
Tensor mean(const Tensor& a);
/// Sums over the last axis: [..., n] -> [...].
Tensor sum_last(const Tensor& a);

// Normalization
Tensor layer_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  double eps = 1e-5);

/// Batch normalization over rows of x[N, C]. In training mode batch
/// statistics are used and the running buffers are updated with
/// r <- (1 - momentum) r + momentum * batch (unbiased variance); in inference
/// mode the running buffers are used and left untouched.
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  std::vector<double>& running_mean, std::vector<double>& running_var,
                  bool training, double momentum = 0.1, double eps = 1e-5);

/// Inverted dropout with a Bernoulli keep-mask drawn from rng; identity when
/// !training or rate == 0.
Tensor dropout(const Tensor& x, double rate, Rng& rng, bool training);
/// Dropout with a caller-supplied 0/1 keep mask.
Tensor dropout_with_mask(const Tensor& x, const std::vector<double>& keep_mask, double rate);

// Fused losses
/// Per-row Huber on the Euclidean norm of r[N, d]: returns [N] with
/// |r|^2/(2 delta) when |r| <= delta, |r| - delta/2 otherwise.
Tensor huber_norm(const Tensor& r, double delta);

/// Mean binary cross-entropy of sigmoid(logits) against 0/1 targets, in the
/// numerically stable log-sum-exp form. Shapes must match.
Tensor bce_with_logits(const Tensor& logits, const Tensor& targets);

}  // namespace mint::nn
