// SPDX-License-Identifier: Apache-2.0
#include "mint/numerics/layers.hpp"

#include <cmath>

namespace mint::nn {

Tensor uniform_param(Shape shape, double bound, Rng& rng) {
  std::vector<double> v(shape_numel(shape));
  for (auto& x : v) x = rng.uniform(-bound, bound);
  return Tensor(std::move(shape), std::move(v), true);
}

Linear::Linear(std::size_t in, std::size_t out, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  weight_ = uniform_param({in, out}, bound, rng);
  bias_ = uniform_param({out}, bound, rng);
}

Tensor Linear::forward(const Tensor& x) const { return add_bias(matmul(x, weight_), bias_); }

void Linear::collect(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".weight", weight_});
  out.push_back({prefix + ".bias", bias_});
}

BatchNorm1d::BatchNorm1d(std::size_t channels, double momentum)
    : gamma_(Tensor::full({channels}, 1.0, true)),
      beta_(Tensor::zeros({channels}, true)),
      running_mean_(channels, 0.0),
      running_var_(channels, 1.0),
      momentum_(momentum) {}

Tensor BatchNorm1d::forward(const Tensor& x, Mode mode) {
  return batch_norm(x, gamma_, beta_, running_mean_, running_var_, training(mode), momentum_);
}

void BatchNorm1d::collect(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".gamma", gamma_});
  out.push_back({prefix + ".beta", beta_});
}

void BatchNorm1d::collect_buffers(const std::string& prefix, BufferList& out) {
  out.push_back({prefix + ".running_mean", &running_mean_});
  out.push_back({prefix + ".running_var", &running_var_});
}

LayerNorm::LayerNorm(std::size_t width)
    : gamma_(Tensor::full({width}, 1.0, true)), beta_(Tensor::zeros({width}, true)) {}

Tensor LayerNorm::forward(const Tensor& x) const { return layer_norm(x, gamma_, beta_); }

void LayerNorm::collect(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".gamma", gamma_});
  out.push_back({prefix + ".beta", beta_});
}

GruCell::GruCell(std::size_t input, std::size_t hidden, Rng& rng) : input_(input), hidden_(hidden) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  wx_ = uniform_param({input, 3 * hidden}, bound, rng);
  bx_ = uniform_param({3 * hidden}, bound, rng);
  wh_ = uniform_param({hidden, 3 * hidden}, bound, rng);
  bh_ = uniform_param({3 * hidden}, bound, rng);
}

Tensor GruCell::project_input(const Tensor& x) const { return add_bias(matmul(x, wx_), bx_); }

Tensor GruCell::step(const Tensor& input_gates, const Tensor& h) const {
  const std::size_t H = hidden_;
  const Tensor hg = add_bias(matmul(h, wh_), bh_);
  const Tensor r = sigmoid(add(slice(input_gates, 1, 0, H), slice(hg, 1, 0, H)));
  const Tensor u = sigmoid(add(slice(input_gates, 1, H, 2 * H), slice(hg, 1, H, 2 * H)));
  const Tensor n = tanh(add(slice(input_gates, 1, 2 * H, 3 * H), mul(r, slice(hg, 1, 2 * H, 3 * H))));
  // h' = n + u * (h - n)
  return add(n, mul(u, sub(h, n)));
}

void GruCell::collect(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".wx", wx_});
  out.push_back({prefix + ".bx", bx_});
  out.push_back({prefix + ".wh", wh_});
  out.push_back({prefix + ".bh", bh_});
}

LstmCell::LstmCell(std::size_t input, std::size_t hidden, Rng& rng) : input_(input), hidden_(hidden) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(hidden));
  wx_ = uniform_param({input, 4 * hidden}, bound, rng);
  bx_ = uniform_param({4 * hidden}, bound, rng);
  wh_ = uniform_param({hidden, 4 * hidden}, bound, rng);
  bh_ = uniform_param({4 * hidden}, bound, rng);
}

Tensor LstmCell::project_input(const Tensor& x) const { return add_bias(matmul(x, wx_), bx_); }

std::pair<Tensor, Tensor> LstmCell::step(const Tensor& input_gates, const Tensor& h,
                                         const Tensor& c) const {
  const std::size_t H = hidden_;
  const Tensor g = add(input_gates, add_bias(matmul(h, wh_), bh_));
  const Tensor i = sigmoid(slice(g, 1, 0, H));
  const Tensor f = sigmoid(slice(g, 1, H, 2 * H));
  const Tensor cand = tanh(slice(g, 1, 2 * H, 3 * H));
  const Tensor o = sigmoid(slice(g, 1, 3 * H, 4 * H));
  Tensor c_next = add(mul(f, c), mul(i, cand));
  Tensor h_next = mul(o, tanh(c_next));
  return {h_next, c_next};
}

void LstmCell::collect(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".wx", wx_});
  out.push_back({prefix + ".bx", bx_});
  out.push_back({prefix + ".wh", wh_});
  out.push_back({prefix + ".bh", bh_});
}

MultiHeadSelfAttention::MultiHeadSelfAttention(std::size_t width, std::size_t heads, Rng& rng)
    : width_(width), heads_(heads), q_(width, width, rng), k_(width, width, rng),
      v_(width, width, rng), o_(width, width, rng) {
  if (heads == 0 || width % heads != 0) {
    throw std::invalid_argument("MultiHeadSelfAttention: " + std::to_string(heads) +
                                " heads do not divide width " + std::to_string(width));
  }
}

Tensor MultiHeadSelfAttention::forward(const Tensor& x, std::size_t batch, std::size_t time) const {
  const std::size_t dh = width_ / heads_;
  // [B*T, W] -> [B*heads, T, dh]
  auto split_heads = [&](const Tensor& t) {
    return reshape(permute(reshape(t, {batch, time, heads_, dh}), {0, 2, 1, 3}),
                   {batch * heads_, time, dh});
  };
  const Tensor q = split_heads(q_.forward(x));
  const Tensor k = split_heads(k_.forward(x));
  const Tensor v = split_heads(v_.forward(x));
  const Tensor scores = scale(bmm(q, permute(k, {0, 2, 1})), 1.0 / std::sqrt(static_cast<double>(dh)));
  const Tensor context = bmm(softmax(scores), v);
  const Tensor merged =
      reshape(permute(reshape(context, {batch, heads_, time, dh}), {0, 2, 1, 3}), {batch * time, width_});
  return o_.forward(merged);
}

void MultiHeadSelfAttention::collect(const std::string& prefix, ParamList& out) const {
  q_.collect(prefix + ".q", out);
  k_.collect(prefix + ".k", out);
  v_.collect(prefix + ".v", out);
  o_.collect(prefix + ".o", out);
}

TransformerEncoderBlock::TransformerEncoderBlock(std::size_t width, std::size_t heads,
                                                 std::size_t ffn_width, Rng& rng)
    : attention_(width, heads, rng), norm1_(width), norm2_(width),
      ffn_in_(width, ffn_width, rng), ffn_out_(ffn_width, width, rng) {}

Tensor TransformerEncoderBlock::forward(const Tensor& x, std::size_t batch, std::size_t time) const {
  const Tensor a = norm1_.forward(add(x, attention_.forward(x, batch, time)));
  return norm2_.forward(add(a, ffn_out_.forward(relu(ffn_in_.forward(a)))));
}

void TransformerEncoderBlock::collect(const std::string& prefix, ParamList& out) const {
  attention_.collect(prefix + ".attn", out);
  norm1_.collect(prefix + ".norm1", out);
  ffn_in_.collect(prefix + ".ffn_in", out);
  ffn_out_.collect(prefix + ".ffn_out", out);
  norm2_.collect(prefix + ".norm2", out);
}

std::vector<Tensor> split_time_major(const Tensor& x, std::size_t time) {
  if (x.rank() != 2 || time == 0 || x.dim(0) % time != 0) {
    throw ShapeError("split_time_major: cannot split " + to_string(x.shape()) + " into " +
                     std::to_string(time) + " steps");
  }
  const std::size_t batch = x.dim(0) / time;
  std::vector<Tensor> out;
  out.reserve(time);
  for (std::size_t t = 0; t < time; ++t) out.push_back(slice(x, 0, t * batch, (t + 1) * batch));
  return out;
}

}  // namespace mint::nn
