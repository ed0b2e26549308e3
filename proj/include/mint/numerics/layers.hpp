// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mint/numerics/adam.hpp"
#include "mint/numerics/ops.hpp"
#include "mint/numerics/rng.hpp"
#include "mint/numerics/tensor.hpp"

namespace mint::nn {

enum class Mode { kTrain, kEval };

inline bool training(Mode m) { return m == Mode::kTrain; }

/// Non-trainable state that must survive a checkpoint (batch-norm running
/// statistics).
struct NamedBuffer {
  std::string name;
  std::vector<double>* data;
};
using BufferList = std::vector<NamedBuffer>;

/// Trainable parameter with PyTorch-style U(-bound, bound) initialization.
Tensor uniform_param(Shape shape, double bound, Rng& rng);

class Linear {
 public:
  Linear() = default;
  Linear(std::size_t in, std::size_t out, Rng& rng);

  Tensor forward(const Tensor& x) const;  // [N, in] -> [N, out]
  void collect(const std::string& prefix, ParamList& out) const;

  std::size_t in_features() const { return weight_.defined() ? weight_.dim(0) : 0; }
  std::size_t out_features() const { return weight_.defined() ? weight_.dim(1) : 0; }
  Tensor& weight() { return weight_; }
  Tensor& bias() { return bias_; }
  const Tensor& weight() const { return weight_; }
  const Tensor& bias() const { return bias_; }

 private:
  Tensor weight_;  // [in, out]
  Tensor bias_;    // [out]
};

class BatchNorm1d {
 public:
  BatchNorm1d() = default;
  explicit BatchNorm1d(std::size_t channels, double momentum = 0.1);

  Tensor forward(const Tensor& x, Mode mode);
  void collect(const std::string& prefix, ParamList& out) const;
  void collect_buffers(const std::string& prefix, BufferList& out);

  const std::vector<double>& running_mean() const { return running_mean_; }
  const std::vector<double>& running_var() const { return running_var_; }

 private:
  Tensor gamma_, beta_;
  std::vector<double> running_mean_, running_var_;
  double momentum_ = 0.1;
};

class LayerNorm {
 public:
  LayerNorm() = default;
  explicit LayerNorm(std::size_t width);

  Tensor forward(const Tensor& x) const;
  void collect(const std::string& prefix, ParamList& out) const;

 private:
  Tensor gamma_, beta_;
};

/// GRU cell, gate order (reset, update, candidate):
///   r = s(Wx_r x + Wh_r h + b), u = s(...), n = tanh(Wx_n x + b + r*(Wh_n h + b)),
///   h' = (1 - u) * n + u * h.
class GruCell {
 public:
  GruCell() = default;
  GruCell(std::size_t input, std::size_t hidden, Rng& rng);

  /// Input-side gate pre-activations x Wx + bx for any number of rows; lets
  /// callers project a whole unrolled sequence with one matmul.
  Tensor project_input(const Tensor& x) const;
  Tensor step(const Tensor& input_gates, const Tensor& h) const;
  void collect(const std::string& prefix, ParamList& out) const;

  std::size_t hidden() const { return hidden_; }
  std::size_t input() const { return input_; }

 private:
  std::size_t input_ = 0, hidden_ = 0;
  Tensor wx_, bx_, wh_, bh_;
};

/// LSTM cell, gate order (input, forget, cell, output).
class LstmCell {
 public:
  LstmCell() = default;
  LstmCell(std::size_t input, std::size_t hidden, Rng& rng);

  Tensor project_input(const Tensor& x) const;
  /// Returns (h', c').
  std::pair<Tensor, Tensor> step(const Tensor& input_gates, const Tensor& h,
                                 const Tensor& c) const;
  void collect(const std::string& prefix, ParamList& out) const;

  std::size_t hidden() const { return hidden_; }

 private:
  std::size_t input_ = 0, hidden_ = 0;
  Tensor wx_, bx_, wh_, bh_;
};

/// Bidirectional multi-head self-attention over fixed-length sequences laid
/// out as [batch * time, width].
class MultiHeadSelfAttention {
 public:
  MultiHeadSelfAttention() = default;
  MultiHeadSelfAttention(std::size_t width, std::size_t heads, Rng& rng);

  Tensor forward(const Tensor& x, std::size_t batch, std::size_t time) const;
  void collect(const std::string& prefix, ParamList& out) const;

 private:
  std::size_t width_ = 0, heads_ = 0;
  Linear q_, k_, v_, o_;
};

/// Post-norm encoder block: x = LN(x + MHA(x)); x = LN(x + FFN(x)).
class TransformerEncoderBlock {
 public:
  TransformerEncoderBlock() = default;
  TransformerEncoderBlock(std::size_t width, std::size_t heads, std::size_t ffn_width, Rng& rng);

  Tensor forward(const Tensor& x, std::size_t batch, std::size_t time) const;
  void collect(const std::string& prefix, ParamList& out) const;

 private:
  MultiHeadSelfAttention attention_;
  LayerNorm norm1_, norm2_;
  Linear ffn_in_, ffn_out_;
};

/// Splits time-major rows [time * batch, n] into `time` tensors of [batch, n].
std::vector<Tensor> split_time_major(const Tensor& x, std::size_t time);

}  // namespace mint::nn
