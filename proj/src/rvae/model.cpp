// SPDX-License-Identifier: Apache-2.0
#include "mint/rvae/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "mint/data/tensorize.hpp"
#include "mint/numerics/checkpoint.hpp"

namespace mint::rvae {

using data::kEmotionBegin;
using data::kFrameDims;
using data::kLabelIndex;
using data::kPoseDims;

Tensor reparameterize(const Tensor& mu, const Tensor& logvar, Rng& rng) {
  if (mu.shape() != logvar.shape()) {
    throw nn::ShapeError("reparameterize: mu " + nn::to_string(mu.shape()) + " vs logvar " +
                         nn::to_string(logvar.shape()));
  }
  std::vector<double> eps(mu.numel());
  for (auto& e : eps) e = rng.normal();
  const Tensor noise(mu.shape(), std::move(eps));
  return nn::add(mu, nn::mul(nn::exp(nn::scale(logvar, 0.5)), noise));
}

RvaeModel::RvaeModel(const RvaeHyper& hyper, Rng& rng) : hyper_(hyper) {
  hyper_.validate();
  std::size_t in = kFrameDims;
  for (std::size_t i = 0; i < 3; ++i) {
    mlp_[i] = nn::Linear(in, hyper_.mlp_dims[i], rng);
    mlp_norm_[i] = nn::BatchNorm1d(hyper_.mlp_dims[i]);
    in = hyper_.mlp_dims[i];
  }
  encoder_gru_ = nn::GruCell(in, hyper_.encoder_hidden, rng);
  mu_head_ = nn::Linear(hyper_.encoder_hidden, hyper_.latent_dim, rng);
  logvar_head_ = nn::Linear(hyper_.encoder_hidden, hyper_.latent_dim, rng);
  input_projection_ = nn::Linear(kFrameDims, hyper_.decoder_input_dim, rng);
  latent_to_hidden_ = nn::Linear(hyper_.latent_dim, hyper_.decoder_hidden, rng);
  decoder_gru_ = nn::GruCell(hyper_.decoder_input_dim + hyper_.latent_dim, hyper_.decoder_hidden, rng);
  output_hidden_ = nn::Linear(hyper_.decoder_hidden, hyper_.output_hidden, rng);
  output_frame_ = nn::Linear(hyper_.output_hidden, kFrameDims, rng);
}

Posterior RvaeModel::encode(const Tensor& inputs, std::size_t steps, Mode mode, Rng& rng) {
  if (inputs.rank() != 2 || inputs.cols() != kFrameDims || steps == 0 || inputs.rows() % steps != 0) {
    throw nn::ShapeError("encode: expected time-major [steps * B, 59] with steps=" +
                         std::to_string(steps) + ", got " + nn::to_string(inputs.shape()));
  }
  const std::size_t batch = inputs.rows() / steps;
  Tensor x = inputs;
  for (std::size_t i = 0; i < 3; ++i) {
    x = mlp_norm_[i].forward(mlp_[i].forward(x), mode);
    x = nn::dropout(nn::relu(x), hyper_.dropout, rng, nn::training(mode));
  }
  const auto gates = nn::split_time_major(encoder_gru_.project_input(x), steps);
  Tensor h = Tensor::zeros({batch, hyper_.encoder_hidden});
  for (const auto& g : gates) h = encoder_gru_.step(g, h);
  return {mu_head_.forward(h), logvar_head_.forward(h)};
}

Tensor RvaeModel::initial_hidden(const Tensor& z) const {
  return nn::tanh(latent_to_hidden_.forward(z));
}

DecoderStep RvaeModel::decode_step(const Tensor& z, const Tensor& previous_frame,
                                   const Tensor& hidden) const {
  const Tensor projected = nn::relu(input_projection_.forward(previous_frame));
  const Tensor input = nn::concat({projected, z}, 1);
  const Tensor h = decoder_gru_.step(decoder_gru_.project_input(input), hidden);
  const Tensor raw = output_frame_.forward(nn::relu(output_hidden_.forward(h)));
  const Tensor pose = nn::slice(raw, 1, 0, kPoseDims);
  const Tensor emotion = nn::softmax(nn::slice(raw, 1, kEmotionBegin, kLabelIndex));
  const Tensor label = nn::sigmoid(nn::slice(raw, 1, kLabelIndex, kFrameDims));
  return {nn::concat({pose, emotion, label}, 1), h};
}

ForwardPass RvaeModel::forward(std::span<const data::WindowSample* const> batch, double tau,
                               Mode mode, Rng& rng, bool sample_latent) {
  if (batch.empty()) throw std::invalid_argument("forward: empty batch");
  const std::size_t len = batch.front()->length();
  if (len < 2) throw std::invalid_argument("forward: windows need at least 2 frames");
  const std::size_t steps = len - 1;
  ForwardPass pass;
  pass.tau = tau;
  const Tensor inputs = data::pack_time_major(batch, 0, steps);
  pass.targets = data::pack_time_major(batch, 1, steps);
  pass.posterior = encode(inputs, steps, mode, rng);
  pass.z = sample_latent ? reparameterize(pass.posterior.mu, pass.posterior.logvar, rng)
                         : pass.posterior.mu;

  const auto truth = nn::split_time_major(pass.targets, steps);
  Tensor previous = nn::split_time_major(inputs, steps).front();
  Tensor h = initial_hidden(pass.z);
  std::vector<Tensor> predictions;
  predictions.reserve(steps);
  for (std::size_t t = 0; t < steps; ++t) {
    auto out = decode_step(pass.z, previous, h);
    h = out.hidden;
    if (t + 1 < steps) previous = teacher_forcing_select(truth[t], out.frame, tau, rng);
    predictions.push_back(std::move(out.frame));
  }
  pass.predictions = nn::concat(predictions, 0);
  return pass;
}

Tensor RvaeModel::loss(const ForwardPass& pass, double beta, LossBreakdown* parts) const {
  const auto& p = pass.predictions;
  const auto& y = pass.targets;
  const Tensor pose = pose_loss(nn::slice(p, 1, 0, kPoseDims), nn::slice(y, 1, 0, kPoseDims),
                                hyper_.confidence_floor, hyper_.huber_delta,
                                hyper_.pose_coord_weight, hyper_.pose_conf_weight);
  const Tensor emotion = emotion_loss(nn::slice(p, 1, kEmotionBegin, kLabelIndex),
                                      nn::slice(y, 1, kEmotionBegin, kLabelIndex));
  const Tensor label = label_loss(nn::slice(p, 1, kLabelIndex, kFrameDims),
                                  nn::slice(y, 1, kLabelIndex, kFrameDims));
  const Tensor kl = kl_free_bits(pass.posterior.mu, pass.posterior.logvar, hyper_.free_bits);
  Tensor total = compose_total(pose, emotion, label, kl, hyper_, beta, parts);
  if (parts) parts->tau_used = pass.tau;
  return total;
}

nn::ParamList RvaeModel::parameters() const {
  nn::ParamList out;
  for (std::size_t i = 0; i < 3; ++i) {
    mlp_[i].collect("encoder.mlp" + std::to_string(i), out);
    mlp_norm_[i].collect("encoder.bn" + std::to_string(i), out);
  }
  encoder_gru_.collect("encoder.gru", out);
  mu_head_.collect("encoder.mu", out);
  logvar_head_.collect("encoder.logvar", out);
  input_projection_.collect("decoder.input", out);
  latent_to_hidden_.collect("decoder.init", out);
  decoder_gru_.collect("decoder.gru", out);
  output_hidden_.collect("decoder.out_hidden", out);
  output_frame_.collect("decoder.out_frame", out);
  return out;
}

nn::BufferList RvaeModel::buffers() {
  nn::BufferList out;
  for (std::size_t i = 0; i < 3; ++i) mlp_norm_[i].collect_buffers("encoder.bn" + std::to_string(i), out);
  return out;
}

namespace {

void check_windows(const std::vector<data::WindowSample>& windows) {
  if (windows.empty()) throw std::invalid_argument("train_rvae: no training windows");
  const std::size_t len = windows.front().length();
  if (len < 2) throw std::invalid_argument("train_rvae: windows need at least 2 frames");
  for (const auto& w : windows) {
    if (w.length() != len) throw std::invalid_argument("train_rvae: windows of unequal length");
  }
}

void accumulate(LossBreakdown& sum, const LossBreakdown& b, double weight) {
  sum.pose += weight * b.pose;
  sum.emotion += weight * b.emotion;
  sum.label += weight * b.label;
  sum.kl += weight * b.kl;
  sum.total += weight * b.total;
}

}  // namespace

RvaeTrainResult train_rvae(const std::vector<data::WindowSample>& windows, const RvaeHyper& hyper,
                           Rng& rng, const RvaeTrainOptions& options) {
  hyper.validate();
  check_windows(windows);
  RvaeTrainResult result{RvaeModel(hyper, rng), {}};
  auto& model = result.model;
  nn::Adam optimizer(model.parameters(), {hyper.learning_rate, hyper.weight_decay});
  std::vector<std::size_t> order(windows.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    const double beta = beta_schedule(static_cast<double>(epoch), hyper.beta_max, hyper.warmup_epochs);
    const double tau = teacher_forcing_probability(epoch, hyper.epochs);
    rng.shuffle(std::span<std::size_t>(order));
    EpochLog log;
    log.epoch = epoch;
    for (std::size_t begin = 0; begin < order.size(); begin += hyper.batch_size) {
      const std::size_t end = std::min(order.size(), begin + hyper.batch_size);
      std::vector<const data::WindowSample*> batch;
      for (std::size_t i = begin; i < end; ++i) batch.push_back(&windows[order[i]]);
      optimizer.zero_grad();
      LossBreakdown parts;
      const auto pass = model.forward(batch, tau, Mode::kTrain, rng);
      const Tensor total = model.loss(pass, beta, &parts);
      if (!std::isfinite(parts.total)) {
        throw TrainingError("non-finite loss at epoch " + std::to_string(epoch) + " (pose " +
                            std::to_string(parts.pose) + ", emotion " + std::to_string(parts.emotion) +
                            ", label " + std::to_string(parts.label) + ", kl " +
                            std::to_string(parts.kl) + ")");
      }
      total.backward();
      optimizer.step();
      accumulate(log.loss, parts, static_cast<double>(batch.size()) / static_cast<double>(order.size()));
    }
    log.loss.beta_used = beta;
    log.loss.tau_used = tau;
    if (options.on_epoch) options.on_epoch(log);
    result.history.push_back(log);
  }
  return result;
}

ReconstructionStats reconstruction_stats(RvaeModel& model, const data::WindowSample& window) {
  Rng unused(0);
  const data::WindowSample* batch[] = {&window};
  const auto pass = model.forward(batch, 1.0, Mode::kEval, unused, false);
  LossBreakdown parts;
  model.loss(pass, 0.0, &parts);
  const auto p = pass.predictions.values();
  const auto y = pass.targets.values();
  double se = 0.0;
  const std::size_t rows = pass.predictions.rows();
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < kPoseDims; ++c) {
      const double d = p[r * kFrameDims + c] - y[r * kFrameDims + c];
      se += d * d;
    }
  }
  return {se / static_cast<double>(rows * kPoseDims), parts.emotion, parts.label};
}

std::vector<GeneratedWindow> generate(const RvaeModel& model, std::size_t n, std::size_t length,
                                      Rng& rng, std::span<const data::FrameFeature> seed_pool) {
  if (n == 0) return {};
  if (length == 0) throw std::invalid_argument("generate: length must be positive");
  if (seed_pool.empty()) throw std::invalid_argument("generate: empty seed frame pool");
  const std::size_t latent = model.hyper().latent_dim;
  std::vector<double> zv(n * latent);
  for (auto& v : zv) v = rng.normal();
  const Tensor z({n, latent}, std::move(zv));
  std::vector<double> seeds(n * kFrameDims);
  for (std::size_t i = 0; i < n; ++i) {
    const auto flat = seed_pool[rng.index(seed_pool.size())].flatten();
    std::copy(flat.begin(), flat.end(), seeds.begin() + static_cast<std::ptrdiff_t>(i * kFrameDims));
  }
  Tensor previous({n, kFrameDims}, std::move(seeds));
  Tensor h = model.initial_hidden(z);

  std::vector<GeneratedWindow> out(n);
  std::vector<std::vector<data::FrameFeature>> frames(n);
  for (std::size_t t = 0; t < length; ++t) {
    auto step = model.decode_step(z, previous, h);
    h = step.hidden.detach();
    previous = step.frame.detach();
    const auto v = previous.values();
    for (std::size_t i = 0; i < n; ++i) {
      std::array<double, kFrameDims> row;
      std::copy_n(v.begin() + static_cast<std::ptrdiff_t>(i * kFrameDims), kFrameDims, row.begin());
      for (std::size_t k = 2; k < kPoseDims; k += 3) row[k] = std::clamp(row[k], 0.0, 1.0);
      out[i].raw_labels.push_back(row[kLabelIndex]);
      frames[i].push_back(data::FrameFeature::unflatten(row));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    out[i].window = data::make_window(std::move(frames[i]), "synthetic-" + std::to_string(i), 0);
  }
  return out;
}

data::WindowGenerator positive_window_generator(std::shared_ptr<const RvaeModel> model,
                                                std::vector<data::FrameFeature> seed_pool,
                                                std::uint64_t seed, std::size_t length,
                                                std::size_t batch_candidates) {
  if (!model) throw std::invalid_argument("positive_window_generator: null model");
  if (batch_candidates == 0) throw std::invalid_argument("positive_window_generator: zero batch size");
  struct State {
    std::shared_ptr<const RvaeModel> model;
    std::vector<data::FrameFeature> pool;
    Rng rng;
    std::deque<data::WindowSample> accepted;
    std::size_t emitted = 0;
  };
  auto state = std::make_shared<State>(State{std::move(model), std::move(seed_pool), Rng(seed), {}, 0});
  return [state, length, batch_candidates]() {
    if (state->accepted.empty()) {
      for (auto& g : generate(*state->model, batch_candidates, length, state->rng, state->pool)) {
        if (g.window.window_label == 1) state->accepted.push_back(std::move(g.window));
      }
      if (state->accepted.empty()) {
        throw std::runtime_error("positive_window_generator: none of " +
                                 std::to_string(batch_candidates) +
                                 " decoded candidates reached the positive-frame threshold");
      }
    }
    auto w = std::move(state->accepted.front());
    state->accepted.pop_front();
    w.record_id = "synthetic-" + std::to_string(state->emitted++);
    return w;
  };
}

void save_rvae(const RvaeModel& model, const std::optional<data::Standardizer>& standardizer,
               const std::string& path) {
  nlohmann::json j;
  j["kind"] = "mint-rvae";
  j["hyper"] = model.hyper();
  j["params"] = nn::tensors_to_json(model.parameters());
  j["buffers"] = nn::buffers_to_json(const_cast<RvaeModel&>(model).buffers());
  j["standardizer"] = standardizer ? nlohmann::json(*standardizer) : nlohmann::json(nullptr);
  nn::write_json_file(j, path);
}

LoadedRvae load_rvae(const std::string& path) {
  const auto j = nn::read_json_file(path);
  if (j.value("kind", std::string()) != "mint-rvae") {
    throw nn::CheckpointError(path + " is not an RVAE checkpoint");
  }
  Rng rng(0);
  LoadedRvae loaded{RvaeModel(j.at("hyper").get<RvaeHyper>(), rng), std::nullopt};
  auto params = loaded.model.parameters();
  nn::tensors_from_json(j.at("params"), params);
  auto buffers = loaded.model.buffers();
  nn::buffers_from_json(j.at("buffers"), buffers);
  if (!j.at("standardizer").is_null()) loaded.standardizer = j.at("standardizer").get<data::Standardizer>();
  return loaded;
}

}  // namespace mint::rvae
