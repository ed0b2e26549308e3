// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <span>
#include <string>
#include <vector>

#include "mint/data/splits.hpp"
#include "mint/data/standardizer.hpp"
#include "mint/data/windows.hpp"
#include "mint/numerics/layers.hpp"
#include "mint/rvae/hyper.hpp"
#include "mint/rvae/losses.hpp"

namespace mint::rvae {

using nn::Mode;
using nn::Rng;

struct Posterior {
  Tensor mu;      // [B, L]
  Tensor logvar;  // [B, L]
};

struct DecoderStep {
  Tensor frame;   // [B, 59]: pose (linear), emotion (softmax), label (sigmoid)
  Tensor hidden;  // [B, decoder_hidden]
};

struct ForwardPass {
  Tensor predictions;  // time-major [(T-1) * B, 59], predictions of frames 2..T
  Tensor targets;      // same layout, ground truth frames 2..T
  Posterior posterior;
  Tensor z;
  double tau = 1.0;
};

/// z = mu + exp(logvar / 2) * eps with eps ~ N(0, I) drawn from rng.
Tensor reparameterize(const Tensor& mu, const Tensor& logvar, Rng& rng);

/// Multimodal recurrent VAE.
///
/// Encoder: per-frame MLP (linear, batch norm, ReLU, dropout) x3 into a GRU;
/// the final hidden state feeds linear heads for mu and log-variance of one
/// sequence-level latent. Decoder: the latent initializes the GRU state
/// through a learned map and is concatenated with the projected previous
/// frame at every step; an output MLP maps the state to the next frame.
///
/// Copies share parameter storage.
class RvaeModel {
 public:
  RvaeModel(const RvaeHyper& hyper, Rng& init_rng);

  const RvaeHyper& hyper() const { return hyper_; }

  /// inputs: time-major [steps * B, 59].
  Posterior encode(const Tensor& inputs, std::size_t steps, Mode mode, Rng& rng);
  Tensor initial_hidden(const Tensor& z) const;
  DecoderStep decode_step(const Tensor& z, const Tensor& previous_frame, const Tensor& hidden) const;

  /// Encodes frames 1..T-1 and decodes one step ahead with per-row
  /// scheduled sampling at probability `tau`. With sample_latent false the
  /// decoder uses z = mu.
  ForwardPass forward(std::span<const data::WindowSample* const> batch, double tau, Mode mode,
                      Rng& rng, bool sample_latent = true);

  /// Splits predictions into modality blocks and composes the weighted loss.
  Tensor loss(const ForwardPass& pass, double beta, LossBreakdown* parts = nullptr) const;

  nn::ParamList parameters() const;
  nn::BufferList buffers();

 private:
  RvaeHyper hyper_;
  std::array<nn::Linear, 3> mlp_;
  std::array<nn::BatchNorm1d, 3> mlp_norm_;
  nn::GruCell encoder_gru_;
  nn::Linear mu_head_, logvar_head_;
  nn::Linear input_projection_, latent_to_hidden_;
  nn::GruCell decoder_gru_;
  nn::Linear output_hidden_, output_frame_;
};

struct EpochLog {
  std::size_t epoch = 0;
  LossBreakdown loss;  // batch means
};

class TrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RvaeTrainOptions {
  std::function<void(const EpochLog&)> on_epoch;
};

struct RvaeTrainResult {
  RvaeModel model;
  std::vector<EpochLog> history;
};

/// Adam with L2 decay, batches reshuffled every epoch; beta and the
/// teacher-forcing probability follow their per-epoch schedules. Aborts with
/// TrainingError on a non-finite loss.
RvaeTrainResult train_rvae(const std::vector<data::WindowSample>& windows, const RvaeHyper& hyper,
                           Rng& rng, const RvaeTrainOptions& options = {});

struct ReconstructionStats {
  double pose_mse = 0.0;     // over all 51 pose channels of frames 2..T
  double emotion_kl = 0.0;   // mean per frame
  double label_bce = 0.0;
};

/// Teacher-forced, inference-mode reconstruction with z = mu.
ReconstructionStats reconstruction_stats(RvaeModel& model, const data::WindowSample& window);

struct GeneratedWindow {
  data::WindowSample window;      // labels binarized at 0.5
  std::vector<double> raw_labels;  // sigmoid outputs
};

/// Decodes n windows of `length` frames from z ~ N(0, I), each seeded by a
/// frame drawn uniformly from `seed_pool` and fed back autoregressively.
/// Confidences are clipped to [0, 1] in the emitted frames.
std::vector<GeneratedWindow> generate(const RvaeModel& model, std::size_t n, std::size_t length,
                                      Rng& rng, std::span<const data::FrameFeature> seed_pool);

/// Class-targeted generator for rebalancing. Candidates are decoded in
/// batches of `batch_candidates`; those with fewer than kMinPositiveFrames
/// positive labels are rejected, and a batch with no accepted candidate
/// throws.
data::WindowGenerator positive_window_generator(std::shared_ptr<const RvaeModel> model,
                                                std::vector<data::FrameFeature> seed_pool,
                                                std::uint64_t seed,
                                                std::size_t length = data::kWindowLength,
                                                std::size_t batch_candidates = 20);

void save_rvae(const RvaeModel& model, const std::optional<data::Standardizer>& standardizer,
               const std::string& path);

struct LoadedRvae {
  RvaeModel model;
  std::optional<data::Standardizer> standardizer;
};
LoadedRvae load_rvae(const std::string& path);

}  // namespace mint::rvae
