// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <iosfwd>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mint/data/standardizer.hpp"
#include "mint/data/tensorize.hpp"
#include "mint/data/windows.hpp"
#include "mint/numerics/layers.hpp"

namespace mint::detect {

using data::InputMode;
using nn::Rng;
using nn::Tensor;

enum class Backbone { kGru, kLstm, kTransformer };

const char* to_string(Backbone b);
Backbone backbone_from_string(const std::string& name);

/// Hidden sizes used for the published comparisons.
std::size_t reference_hidden_size(Backbone backbone, InputMode mode);

struct DetectorConfig {
  Backbone backbone = Backbone::kTransformer;
  InputMode input_mode = InputMode::kMultimodal;
  std::size_t hidden = 256;
  std::size_t heads = 4;              // transformer only
  std::size_t window_length = data::kWindowLength;

  std::size_t epochs = 200;
  std::size_t batch_size = 64;
  double learning_rate = 1e-3;
  double weight_decay = 0.0;
  std::size_t patience = 50;  // epochs without validation improvement

  void validate() const;
};

void to_json(nlohmann::json& j, const DetectorConfig& c);
void from_json(const nlohmann::json& j, DetectorConfig& c);

/// Frame-level intent classifier. Recurrent backbones map each hidden state
/// through a linear head; the transformer projects inputs to width H, adds a
/// learned positional embedding, applies one post-norm encoder block and a
/// LayerNorm + linear head. Copies share parameters.
class Detector {
 public:
  Detector(const DetectorConfig& config, Rng& init_rng);

  const DetectorConfig& config() const { return config_; }

  /// features: time-major [T * B, input_width] -> logits [T * B, 1].
  Tensor logits(const Tensor& features, std::size_t batch) const;

  nn::ParamList parameters() const;

  /// Shared handles; writing through them edits the model.
  Tensor positional_embedding() const { return positional_; }
  Tensor head_weight() const;
  Tensor head_bias() const;

 private:
  Tensor transformer_logits(const Tensor& features, std::size_t batch) const;

  DetectorConfig config_;
  nn::GruCell gru_;
  nn::LstmCell lstm_;
  nn::Linear input_projection_;
  Tensor positional_;  // [T, H]
  nn::TransformerEncoderBlock block_;
  nn::LayerNorm head_norm_;
  nn::Linear head_;
};

/// Per-frame probabilities for each window, in window order.
std::vector<std::vector<double>> predict_windows(const Detector& detector,
                                                 std::span<const data::WindowSample* const> windows);
std::vector<std::vector<double>> predict_windows(const Detector& detector,
                                                 const std::vector<data::WindowSample>& windows);

/// Frame-level AUROC of the detector over all frames of `windows`.
double frame_auroc(const Detector& detector, const std::vector<data::WindowSample>& windows);

struct DetectorEpoch {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;     // NaN without validation data
  double validation_auroc = 0.0;    // NaN when undefined
};

struct DetectorTrainResult {
  Detector detector;
  std::vector<DetectorEpoch> history;
  std::size_t best_epoch = 0;
};

class DetectorTrainingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mean per-frame BCE, Adam, shuffled batches. With validation windows the
/// best epoch by validation frame AUROC (validation loss when the
/// validation labels are single-class) is restored, and training stops after
/// `patience` epochs without improvement.
DetectorTrainResult train_detector(const DetectorConfig& config,
                                   const std::vector<data::WindowSample>& train,
                                   const std::vector<data::WindowSample>& validation, Rng& rng);

/// Per-frame probabilities for a whole record from windows at starts
/// 0, stride, ... plus a final window flush with the end; overlapping
/// predictions are averaged.
std::vector<double> predict_sequence(const Detector& detector, const data::SequenceRecord& record,
                                     std::size_t stride);

/// `frame_index,probability,label` rows with a header.
void write_prediction_csv(std::ostream& out, const data::SequenceRecord& record,
                          std::span<const double> probabilities);

void save_detector(const Detector& detector, const std::optional<data::Standardizer>& standardizer,
                   const std::string& path);

struct LoadedDetector {
  Detector detector;
  std::optional<data::Standardizer> standardizer;
};
LoadedDetector load_detector(const std::string& path);

}  // namespace mint::detect
